#ifndef FOLMT_METRICS_HPP
#define FOLMT_METRICS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "folmt/harness.hpp"
#include "folmt/rewrite.hpp"

namespace folmt {

struct GroupOutcome {
  std::string mg_id;
  MrId mr = MrId::E1_1;
  std::optional<Label> gold;
  ParsedLabel y_source = ParsedLabel::ParseError;
  ParsedLabel y_follow_up = ParsedLabel::ParseError;
  bool violation = false;
  bool parse_issue = false;
};

// True when the pair violates the relation. Every relation expects equal labels.
bool check_oracle(Label y_source, Label y_follow_up) noexcept;

GroupOutcome make_outcome(std::string mg_id, MrId mr, std::optional<Label> gold, ParsedLabel y_source,
                          ParsedLabel y_follow_up);

// Joins run records for one SUT and strategy onto their groups. Groups with a
// missing answer are left out.
std::vector<GroupOutcome> collect_outcomes(const std::vector<MetamorphicGroup>& groups,
                                           const std::vector<RunRecord>& records, const std::string& sut,
                                           PromptStrategy strategy);

// Groups with an unparsed answer are either set aside in parse_excluded or
// counted like any other group, an unparsed answer never matching gold and
// differing from every parsed one.
enum class ParsePolicy { Exclude, Include };

// Raw counts; every rate is a ratio of two of them.
struct Counts {
  std::uint64_t groups = 0;
  std::uint64_t parse_excluded = 0;
  std::uint64_t evaluable = 0;
  std::uint64_t violations = 0;
  // Evaluable groups that carry a gold label, and partitions of them.
  std::uint64_t with_gold = 0;
  std::uint64_t static_correct = 0;      // source answer is gold
  std::uint64_t consistent_correct = 0;  // both answers gold
  std::uint64_t hidden_defects = 0;      // source gold, oracle violated
  std::uint64_t undetected = 0;          // both wrong, no violation

  void add(const GroupOutcome& o, ParsePolicy policy = ParsePolicy::Exclude);
  Counts& operator+=(const Counts& other);
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct Rate {
  std::uint64_t num = 0;
  std::uint64_t den = 0;
  bool defined() const noexcept { return den != 0; }
  double value() const noexcept { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }
};

Rate mvr(const Counts& c) noexcept;
Rate acc_static(const Counts& c) noexcept;
Rate acc_cons(const Counts& c) noexcept;
Rate hdr(const Counts& c) noexcept;
Rate fur(const Counts& c) noexcept;

// "26.76%", two decimals rounded half up; "-" for an empty denominator.
std::string format_percent(const Rate& r);

struct MetricsSummary {
  Counts overall;
  std::map<MrId, Counts> per_mr;
  std::map<MrCategory, Counts> per_category;
  friend bool operator==(const MetricsSummary&, const MetricsSummary&) = default;
};

// Throws EmptyInput on an empty list.
MetricsSummary summarize(const std::vector<GroupOutcome>& outcomes, ParsePolicy policy = ParsePolicy::Exclude);

enum class AuditFlag { None, Drift, Parse };

struct AuditSummary {
  std::uint64_t inspected = 0;
  std::uint64_t fp_drift = 0;
  std::uint64_t fp_parse = 0;
  Rate frr() const noexcept { return {fp_drift + fp_parse, inspected}; }
};

// Throws EmptyInput on an empty list.
AuditSummary summarize_audit(const std::vector<AuditFlag>& flags);

enum class ReportFormat { TableText, Csv, Structured };
const char* to_string(ReportFormat f) noexcept;
std::optional<ReportFormat> report_format_from_string(std::string_view s) noexcept;

// SUT name to summary. Output is a pure function of the input.
using Report = std::map<std::string, MetricsSummary>;

std::string emit_report(const Report& report, ReportFormat format);
void write_report(const std::filesystem::path& path, const Report& report, ReportFormat format);

// Inverse of the csv format. Throws ConfigError on malformed input.
Report load_csv_report(const std::string& text);

}  // namespace folmt

#endif  // FOLMT_METRICS_HPP
