#include "folmt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <ctime>
#include <exception>
#include <thread>

#include "folmt/errors.hpp"
#include "folmt/prompts.hpp"
#include "folmt/realizer.hpp"

namespace folmt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string label_json(const char* label) { return std::string("{\"label\": \"") + label + "\"}"; }

Label flipped(Label l) {
  switch (l) {
    case Label::True: return Label::False;
    case Label::False: return Label::True;
    case Label::Unknown: return Label::True;
  }
  return Label::Unknown;
}

std::optional<MrCategory> category_from_string(std::string_view s) {
  if (s.starts_with("MR-")) s.remove_prefix(3);
  if (s == "E") return MrCategory::E;
  if (s == "S") return MrCategory::S;
  if (s == "P") return MrCategory::P;
  if (s == "C") return MrCategory::C;
  return std::nullopt;
}

// Text between `marker` and the next blank line (or the end).
std::optional<std::string> field_after(const std::string& text, const std::string& marker) {
  auto at = text.find(marker);
  if (at == std::string::npos) return std::nullopt;
  at += marker.size();
  auto end = text.find('\n', at);
  return text.substr(at, end == std::string::npos ? std::string::npos : end - at);
}

std::string comparable(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.back() == '.') s.remove_suffix(1);
  s = trim(s);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

using RunKey = std::tuple<std::string, CaseRole, std::string, PromptStrategy>;

}  // namespace

const char* to_string(PromptStrategy s) noexcept {
  switch (s) {
    case PromptStrategy::ZeroShot: return "zero-shot";
    case PromptStrategy::ZeroShotCoT: return "zero-shot-cot";
    case PromptStrategy::FewShot: return "few-shot";
    case PromptStrategy::FewShotCoT: return "few-shot-cot";
  }
  return "?";
}

std::optional<PromptStrategy> strategy_from_string(std::string_view s) noexcept {
  for (auto st : {PromptStrategy::ZeroShot, PromptStrategy::ZeroShotCoT, PromptStrategy::FewShot,
                  PromptStrategy::FewShotCoT})
    if (s == to_string(st)) return st;
  return std::nullopt;
}

Prompt build_prompt(const SourceRecord& record, PromptStrategy strategy) {
  PromptId system = PromptId::EntailZeroShotSystem;
  switch (strategy) {
    case PromptStrategy::ZeroShot: system = PromptId::EntailZeroShotSystem; break;
    case PromptStrategy::ZeroShotCoT: system = PromptId::EntailZeroShotCotSystem; break;
    case PromptStrategy::FewShot: system = PromptId::EntailFewShotSystem; break;
    case PromptStrategy::FewShotCoT: system = PromptId::EntailFewShotCotSystem; break;
  }
  std::string premises;
  for (std::size_t i = 0; i < record.premises_nl.size(); ++i) {
    if (i) premises += '\n';
    premises += record.premises_nl[i];
  }
  return {std::string(prompt_text(system)),
          fill_template(prompt_text(PromptId::EntailUser),
                        {{"premises_text", premises}, {"conclusion_text", record.conclusion_nl}})};
}

ChatRequest to_request(const Prompt& prompt) {
  ChatRequest req;
  req.messages.push_back({"system", prompt.system});
  req.messages.push_back({"user", prompt.user});
  return req;
}

const char* to_string(ParsedLabel l) noexcept {
  switch (l) {
    case ParsedLabel::True: return "True";
    case ParsedLabel::False: return "False";
    case ParsedLabel::Unknown: return "Unknown";
    case ParsedLabel::ParseError: return "ParseError";
  }
  return "?";
}

std::optional<ParsedLabel> parsed_label_from_string(std::string_view s) noexcept {
  for (auto l : {ParsedLabel::True, ParsedLabel::False, ParsedLabel::Unknown, ParsedLabel::ParseError})
    if (s == to_string(l)) return l;
  return std::nullopt;
}

std::optional<Label> as_label(ParsedLabel l) noexcept {
  switch (l) {
    case ParsedLabel::True: return Label::True;
    case ParsedLabel::False: return Label::False;
    case ParsedLabel::Unknown: return Label::Unknown;
    case ParsedLabel::ParseError: return std::nullopt;
  }
  return std::nullopt;
}

ParsedLabel as_parsed(Label l) noexcept {
  switch (l) {
    case Label::True: return ParsedLabel::True;
    case Label::False: return ParsedLabel::False;
    case Label::Unknown: return ParsedLabel::Unknown;
  }
  return ParsedLabel::ParseError;
}

ParsedLabel parse_label(std::string_view raw, bool strict) {
  std::optional<nlohmann::json> obj;
  if (strict) {
    auto j = nlohmann::json::parse(trim(raw), nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("label")) obj = std::move(j);
  } else {
    obj = extract_json_object(raw, "label");
  }
  if (!obj) return ParsedLabel::ParseError;
  const auto& v = (*obj)["label"];
  if (!v.is_string()) return ParsedLabel::ParseError;
  auto label = label_from_string(v.get<std::string>());
  return label ? as_parsed(*label) : ParsedLabel::ParseError;
}

const char* to_string(CaseRole r) noexcept { return r == CaseRole::Source ? "source" : "follow_up"; }

std::optional<CaseRole> role_from_string(std::string_view s) noexcept {
  if (s == "source") return CaseRole::Source;
  if (s == "follow_up") return CaseRole::FollowUp;
  return std::nullopt;
}

std::string ChatReasoner::answer(const Prompt& prompt, const CaseContext&) {
  return client_->complete(to_request(prompt));
}

ScriptedReasoner::ScriptedReasoner(std::string policy) {
  const auto colon = policy.find(':');
  const std::string head = policy.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : policy.substr(colon + 1);
  auto bad = [&] { return ConfigError("unknown scripted policy '" + policy + "'"); };
  if (head == "gold" && colon == std::string::npos) {
    mode_ = Mode::Gold;
  } else if (head == "constant") {
    auto l = label_from_string(arg);
    if (!l) throw bad();
    mode_ = Mode::Constant;
    constant_ = *l;
  } else if (head == "flip-category" || head == "garbage-category") {
    auto c = category_from_string(arg);
    if (!c) throw bad();
    mode_ = head == "flip-category" ? Mode::FlipCategory : Mode::GarbageCategory;
    category_ = *c;
  } else if (head == "flip-mr") {
    auto m = mr_from_string(arg);
    if (!m) throw bad();
    mode_ = Mode::FlipMr;
    mr_ = *m;
  } else {
    throw bad();
  }
}

std::string ScriptedReasoner::answer(const Prompt&, const CaseContext& ctx) {
  const Label gold = ctx.gold.value_or(Label::Unknown);
  const bool follow_up = ctx.role == CaseRole::FollowUp;
  switch (mode_) {
    case Mode::Gold:
      return label_json(to_string(gold));
    case Mode::Constant:
      return label_json(to_string(constant_));
    case Mode::FlipCategory:
      return label_json(to_string(follow_up && category(ctx.mr) == category_ ? flipped(gold) : gold));
    case Mode::FlipMr:
      return label_json(to_string(follow_up && ctx.mr == mr_ ? flipped(gold) : gold));
    case Mode::GarbageCategory:
      if (follow_up && category(ctx.mr) == category_) return "I believe the conclusion is probably fine.";
      return label_json(to_string(gold));
  }
  return {};
}

std::string ScriptedAuditor::complete(const ChatRequest& request) {
  std::string user;
  for (const auto& m : request.messages)
    if (m.role == "user") user = m.content;
  auto fol = field_after(user, "FOL Formula: ");
  auto nl = field_after(user, "Natural Language Sentence: ");
  if (!fol || !nl) return label_json("False");
  try {
    const auto expected = realize(parse_formula(*fol), lexicon_);
    return label_json(comparable(expected) == comparable(*nl) ? "True" : "False");
  } catch (const SyntaxError&) {
    return label_json("False");
  }
}

std::unique_ptr<Reasoner> make_reasoner(const SutConfig& sut) {
  if (sut.kind == "mock") return std::make_unique<ScriptedReasoner>(sut.policy);
  return std::make_unique<ChatReasoner>(std::make_shared<HttpChatClient>(sut));
}

std::shared_ptr<ChatClient> make_auditor(const SutConfig& auditor) {
  if (auditor.kind == "mock") return std::make_shared<ScriptedAuditor>();
  return std::make_shared<HttpChatClient>(auditor);
}

ParsedLabel audit_translation(const std::string& fol, const std::string& nl, ChatClient& auditor) {
  Prompt p{std::string(prompt_text(PromptId::AuditSystem)),
           fill_template(prompt_text(PromptId::AuditUser), {{"fol", fol}, {"nl", nl}})};
  auto l = parse_label(auditor.complete(to_request(p)));
  return l == ParsedLabel::Unknown ? ParsedLabel::ParseError : l;
}

nlohmann::json run_record_to_json(const RunRecord& r) {
  return {{"mg_id", r.mg_id},
          {"case_role", to_string(r.role)},
          {"sut", r.sut},
          {"strategy", to_string(r.strategy)},
          {"mr", to_string(r.mr)},
          {"raw_output", r.raw_output},
          {"parsed_label", to_string(r.parsed_label)},
          {"latency_ms", r.latency_ms},
          {"timestamp", r.timestamp}};
}

RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  try {
    r.mg_id = j.at("mg_id").get<std::string>();
    auto role = role_from_string(j.at("case_role").get<std::string>());
    auto strategy = strategy_from_string(j.at("strategy").get<std::string>());
    auto mr = mr_from_string(j.at("mr").get<std::string>());
    auto label = parsed_label_from_string(j.at("parsed_label").get<std::string>());
    if (!role || !strategy || !mr || !label) throw ConfigError("run record " + r.mg_id + " has an invalid enum field");
    r.role = *role;
    r.strategy = *strategy;
    r.mr = *mr;
    r.parsed_label = *label;
    r.sut = j.at("sut").get<std::string>();
    r.raw_output = j.value("raw_output", std::string());
    r.latency_ms = j.value("latency_ms", 0.0);
    r.timestamp = j.value("timestamp", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run record: ") + e.what());
  }
  return r;
}

RunLog::RunLog(const std::filesystem::path& path) {
  bool needs_newline = false;
  {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (in && in.tellg() > 0) {
      in.seekg(-1, std::ios::end);
      needs_newline = in.get() != '\n';
    }
  }
  out_.open(path, std::ios::app);
  if (!out_) throw IoError("cannot open run log " + path.string());
  if (needs_newline) out_ << '\n';
}

void RunLog::append(const RunRecord& record) {
  const auto line = run_record_to_json(record).dump();
  std::lock_guard lock(mu_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw IoError("error while appending to the run log");
}

std::vector<RunRecord> RunLog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open run log " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!trim(line).empty()) lines.push_back(std::move(line));
  std::vector<RunRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto j = nlohmann::json::parse(lines[i], nullptr, false);
    if (j.is_discarded()) {
      // an interrupted writer leaves at most one partial line, at the end
      if (i + 1 == lines.size()) continue;
      throw ConfigError(path.string() + ": unreadable run record on line " + std::to_string(i + 1));
    }
    out.push_back(run_record_from_json(j));
  }
  return out;
}

RunStats run_groups(const std::vector<MetamorphicGroup>& groups, const SutConfig& sut, Reasoner& reasoner,
                    const RunOptions& options, const std::filesystem::path& log_path) {
  std::set<RunKey> done;
  if (std::filesystem::exists(log_path))
    for (const auto& r : RunLog::load(log_path)) done.emplace(r.mg_id, r.role, r.sut, r.strategy);

  struct Job {
    const MetamorphicGroup* group;
    CaseRole role;
  };
  std::vector<Job> jobs;
  RunStats stats;
  for (const auto& g : groups) {
    for (auto role : {CaseRole::Source, CaseRole::FollowUp}) {
      if (done.contains(RunKey{g.id, role, sut.name, options.strategy})) {
        ++stats.skipped;
        continue;
      }
      jobs.push_back({&g, role});
    }
  }
  if (jobs.empty()) return stats;

  RunLog log(log_path);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr failure;

  auto work = [&] {
    for (;;) {
      if (stop) return;
      const auto k = next++;
      if (k >= jobs.size()) return;
      const auto& job = jobs[k];
      const auto& g = *job.group;
      const auto& rec = job.role == CaseRole::Source ? g.source : g.follow_up;
      try {
        CaseContext ctx{g.id, job.role, g.mr, g.source.gold_label};
        const auto t0 = std::chrono::steady_clock::now();
        std::string raw;
        try {
          raw = reasoner.answer(build_prompt(rec, options.strategy), ctx);
        } catch (const MalformedResponse&) {
          raw.clear();
        }
        RunRecord r;
        r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        r.mg_id = g.id;
        r.role = job.role;
        r.sut = sut.name;
        r.strategy = options.strategy;
        r.mr = g.mr;
        r.raw_output = std::move(raw);
        r.parsed_label = parse_label(r.raw_output, options.strict_parse);
        r.timestamp = utc_timestamp();
        log.append(r);
        std::lock_guard lock(mu);
        ++stats.queried;
        if (r.parsed_label == ParsedLabel::ParseError) ++stats.parse_errors;
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
        return;
      }
    }
  };

  const std::size_t wanted = options.workers ? options.workers : sut.max_concurrency;
  const std::size_t n = std::max<std::size_t>(1, std::min(wanted, jobs.size()));
  std::vector<std::thread> threads;
  for (std::size_t i = 1; i < n; ++i) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return stats;
}

}  // namespace folmt
