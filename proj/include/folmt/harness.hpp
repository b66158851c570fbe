#ifndef FOLMT_HARNESS_HPP
#define FOLMT_HARNESS_HPP

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "folmt/chat.hpp"
#include "folmt/pipeline.hpp"
#include "folmt/syntax.hpp"

namespace folmt {

enum class PromptStrategy { ZeroShot, ZeroShotCoT, FewShot, FewShotCoT };

// "zero-shot", "zero-shot-cot", "few-shot", "few-shot-cot"
const char* to_string(PromptStrategy s) noexcept;
std::optional<PromptStrategy> strategy_from_string(std::string_view s) noexcept;

struct Prompt {
  std::string system;
  std::string user;
};

// System text is the strategy's template verbatim; the user text lists the
// premises one per line, then the conclusion.
Prompt build_prompt(const SourceRecord& record, PromptStrategy strategy);

ChatRequest to_request(const Prompt& prompt);

enum class ParsedLabel { True, False, Unknown, ParseError };

const char* to_string(ParsedLabel l) noexcept;
std::optional<ParsedLabel> parsed_label_from_string(std::string_view s) noexcept;
std::optional<Label> as_label(ParsedLabel l) noexcept;
ParsedLabel as_parsed(Label l) noexcept;

// First JSON object carrying "label", values matched case-sensitively.
// Strict mode accepts only a whole reply that is such an object.
ParsedLabel parse_label(std::string_view raw, bool strict = false);

enum class CaseRole { Source, FollowUp };

const char* to_string(CaseRole r) noexcept;
std::optional<CaseRole> role_from_string(std::string_view s) noexcept;

// What the harness knows about a query beyond its prompt. Only scripted
// reasoners look at it.
struct CaseContext {
  std::string mg_id;
  CaseRole role = CaseRole::Source;
  MrId mr = MrId::E1_1;
  std::optional<Label> gold;
};

class Reasoner {
 public:
  virtual ~Reasoner() = default;
  virtual std::string answer(const Prompt& prompt, const CaseContext& context) = 0;
};

// Sends the prompt to a chat model.
class ChatReasoner : public Reasoner {
 public:
  explicit ChatReasoner(std::shared_ptr<ChatClient> client) : client_(std::move(client)) {}
  std::string answer(const Prompt& prompt, const CaseContext&) override;

 private:
  std::shared_ptr<ChatClient> client_;
};

// Deterministic offline reasoner. Policies:
//   gold                 answer the gold label (Unknown when absent)
//   constant:<Label>     always answer <Label>
//   flip-category:<X>    gold, except follow-ups of category X (E, S, P or C)
//                        get a different label
//   flip-mr:<MR>         as above for one relation
//   garbage-category:<X> gold, except follow-ups of category X get prose
//                        with no label object
class ScriptedReasoner : public Reasoner {
 public:
  // Throws ConfigError for an unknown policy.
  explicit ScriptedReasoner(std::string policy);
  std::string answer(const Prompt& prompt, const CaseContext& context) override;

 private:
  enum class Mode { Gold, Constant, FlipCategory, FlipMr, GarbageCategory };
  Mode mode_ = Mode::Gold;
  Label constant_ = Label::Unknown;
  MrCategory category_ = MrCategory::E;
  MrId mr_ = MrId::E1_1;
};

// Rule-based auditor speaking the audit prompt protocol: it re-realizes the
// formula and accepts the sentence iff it matches, ignoring case, surrounding
// whitespace and the final period.
class ScriptedAuditor : public ChatClient {
 public:
  explicit ScriptedAuditor(Lexicon lexicon = {}) : lexicon_(std::move(lexicon)) {}
  std::string complete(const ChatRequest& request) override;

 private:
  Lexicon lexicon_;
};

// Builds the reasoner a SUT entry describes.
std::unique_ptr<Reasoner> make_reasoner(const SutConfig& sut);
// An auditor entry of kind "mock" gets the scripted auditor.
std::shared_ptr<ChatClient> make_auditor(const SutConfig& auditor);

// Audit prompts verbatim; True, False or ParseError (Unknown counts as
// ParseError).
ParsedLabel audit_translation(const std::string& fol, const std::string& nl, ChatClient& auditor);

struct RunRecord {
  std::string mg_id;
  CaseRole role = CaseRole::Source;
  std::string sut;
  PromptStrategy strategy = PromptStrategy::ZeroShot;
  MrId mr = MrId::E1_1;
  std::string raw_output;
  ParsedLabel parsed_label = ParsedLabel::ParseError;
  double latency_ms = 0;
  // ISO 8601, UTC.
  std::string timestamp;
};

nlohmann::json run_record_to_json(const RunRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);

// Append-only line-delimited run log; appends from several threads are
// serialized.
class RunLog {
 public:
  explicit RunLog(const std::filesystem::path& path);
  void append(const RunRecord& record);

  // Skips a torn final line left by an interrupted writer.
  static std::vector<RunRecord> load(const std::filesystem::path& path);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

struct RunOptions {
  PromptStrategy strategy = PromptStrategy::ZeroShot;
  bool strict_parse = false;
  // Zero uses the SUT's max_concurrency.
  std::size_t workers = 0;
};

struct RunStats {
  std::size_t queried = 0;
  std::size_t skipped = 0;
  std::size_t parse_errors = 0;
};

// Queries both members of every group, skipping (mg_id, role, sut, strategy)
// keys already in the log. A transport failure stops new work and is
// rethrown once in-flight queries finish; finished answers stay logged.
RunStats run_groups(const std::vector<MetamorphicGroup>& groups, const SutConfig& sut, Reasoner& reasoner,
                    const RunOptions& options, const std::filesystem::path& log_path);

}  // namespace folmt

#endif  // FOLMT_HARNESS_HPP
