#include "folmt/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "folmt/errors.hpp"

namespace folmt {

namespace {

constexpr const char* kCsvHeader =
    "sut,scope,key,groups,parse_excluded,evaluable,violations,with_gold,static_correct,consistent_correct,"
    "hidden_defects,undetected,mvr,acc_static,acc_cons,hdr,fur";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::vector<std::uint64_t> count_fields(const Counts& c) {
  return {c.groups,     c.parse_excluded, c.evaluable,          c.violations,     c.with_gold,
          c.static_correct, c.consistent_correct, c.hidden_defects, c.undetected};
}

std::vector<std::string> rate_fields(const Counts& c) {
  return {format_percent(mvr(c)), format_percent(acc_static(c)), format_percent(acc_cons(c)),
          format_percent(hdr(c)), format_percent(fur(c))};
}

nlohmann::json counts_json(const Counts& c) {
  const auto r = rate_fields(c);
  return {{"groups", c.groups},
          {"parse_excluded", c.parse_excluded},
          {"evaluable", c.evaluable},
          {"violations", c.violations},
          {"with_gold", c.with_gold},
          {"static_correct", c.static_correct},
          {"consistent_correct", c.consistent_correct},
          {"hidden_defects", c.hidden_defects},
          {"undetected", c.undetected},
          {"rates",
           {{"mvr", r[0]}, {"acc_static", r[1]}, {"acc_cons", r[2]}, {"hdr", r[3]}, {"fur", r[4]}}}};
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// Pipe-separated table, columns padded to their widest cell.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& r : rows) {
    widths.resize(std::max(widths.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) widths[i] = std::max(widths[i], r[i].size());
  }
  std::string out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::string line;
    for (std::size_t i = 0; i < rows[k].size(); ++i) {
      if (i) line += " | ";
      line += i + 1 == rows[k].size() ? rows[k][i] : pad(rows[k][i], widths[i]);
    }
    out += line + '\n';
    if (k == 0) {
      std::string rule;
      for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i) rule += "-+-";
        rule += std::string(widths[i], '-');
      }
      out += rule + '\n';
    }
  }
  return out;
}

std::string text_report(const Report& report) {
  std::ostringstream os;
  os << "Metamorphic violation rate per relation\n\n";
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{"Relation"};
  for (const auto& [sut, s] : report) {
    (void)s;
    head.push_back(sut);
  }
  rows.push_back(head);
  for (auto mr : kAllMrs) {
    std::vector<std::string> row{display_name(mr)};
    for (const auto& [sut, s] : report) {
      (void)sut;
      auto it = s.per_mr.find(mr);
      row.push_back(it == s.per_mr.end() ? "-" : format_percent(mvr(it->second)));
    }
    rows.push_back(row);
  }
  for (auto c : kAllCategories) {
    std::vector<std::string> row{to_string(c)};
    for (const auto& [sut, s] : report) {
      (void)sut;
      auto it = s.per_category.find(c);
      row.push_back(it == s.per_category.end() ? "-" : format_percent(mvr(it->second)));
    }
    rows.push_back(row);
  }
  os << render_table(rows) << "\nOverall\n\n";
  rows.clear();
  rows.push_back({"SUT", "Groups", "Evaluable", "Violations", "Parse excluded", "MVR", "Acc_static", "Acc_cons",
                  "HDR", "FUR"});
  for (const auto& [sut, s] : report) {
    const auto& c = s.overall;
    auto r = rate_fields(c);
    rows.push_back({sut, std::to_string(c.groups), std::to_string(c.evaluable), std::to_string(c.violations),
                    std::to_string(c.parse_excluded), r[0], r[1], r[2], r[3], r[4]});
  }
  os << render_table(rows);
  return os.str();
}

std::string csv_report(const Report& report) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  auto row = [&](const std::string& sut, const char* scope, const std::string& key, const Counts& c) {
    os << csv_field(sut) << ',' << scope << ',' << key;
    for (auto v : count_fields(c)) os << ',' << v;
    for (const auto& r : rate_fields(c)) os << ',' << r;
    os << '\n';
  };
  for (const auto& [sut, s] : report) {
    row(sut, "overall", "all", s.overall);
    for (const auto& [c, counts] : s.per_category) row(sut, "category", to_string(c), counts);
    for (const auto& [mr, counts] : s.per_mr) row(sut, "mr", display_name(mr), counts);
  }
  return os.str();
}

std::string structured_report(const Report& report) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["suts"] = nlohmann::json::object();
  for (const auto& [sut, s] : report) {
    nlohmann::json e;
    e["overall"] = counts_json(s.overall);
    e["per_category"] = nlohmann::json::object();
    for (const auto& [c, counts] : s.per_category) e["per_category"][to_string(c)] = counts_json(counts);
    e["per_mr"] = nlohmann::json::object();
    for (const auto& [mr, counts] : s.per_mr) e["per_mr"][display_name(mr)] = counts_json(counts);
    j["suts"][sut] = std::move(e);
  }
  return j.dump(2) + "\n";
}

}  // namespace

bool check_oracle(Label y_source, Label y_follow_up) noexcept { return y_source != y_follow_up; }

GroupOutcome make_outcome(std::string mg_id, MrId mr, std::optional<Label> gold, ParsedLabel y_source,
                          ParsedLabel y_follow_up) {
  GroupOutcome o;
  o.mg_id = std::move(mg_id);
  o.mr = mr;
  o.gold = gold;
  o.y_source = y_source;
  o.y_follow_up = y_follow_up;
  auto s = as_label(y_source);
  auto f = as_label(y_follow_up);
  o.parse_issue = !s || !f;
  o.violation = s && f && check_oracle(*s, *f);
  return o;
}

std::vector<GroupOutcome> collect_outcomes(const std::vector<MetamorphicGroup>& groups,
                                           const std::vector<RunRecord>& records, const std::string& sut,
                                           PromptStrategy strategy) {
  std::map<std::pair<std::string, CaseRole>, ParsedLabel> answers;
  for (const auto& r : records)
    if (r.sut == sut && r.strategy == strategy) answers[{r.mg_id, r.role}] = r.parsed_label;
  std::vector<GroupOutcome> out;
  for (const auto& g : groups) {
    auto s = answers.find({g.id, CaseRole::Source});
    auto f = answers.find({g.id, CaseRole::FollowUp});
    if (s == answers.end() || f == answers.end()) continue;
    out.push_back(make_outcome(g.id, g.mr, g.source.gold_label, s->second, f->second));
  }
  return out;
}

void Counts::add(const GroupOutcome& o, ParsePolicy policy) {
  ++groups;
  if (o.parse_issue && policy == ParsePolicy::Exclude) {
    ++parse_excluded;
    return;
  }
  ++evaluable;
  const bool violation = o.parse_issue ? o.y_source != o.y_follow_up : o.violation;
  if (violation) ++violations;
  if (!o.gold) return;
  ++with_gold;
  const bool s_ok = as_label(o.y_source) == o.gold;
  const bool f_ok = as_label(o.y_follow_up) == o.gold;
  if (s_ok) ++static_correct;
  if (s_ok && f_ok) ++consistent_correct;
  if (s_ok && violation) ++hidden_defects;
  if (!s_ok && !f_ok && !violation) ++undetected;
}

Counts& Counts::operator+=(const Counts& o) {
  groups += o.groups;
  parse_excluded += o.parse_excluded;
  evaluable += o.evaluable;
  violations += o.violations;
  with_gold += o.with_gold;
  static_correct += o.static_correct;
  consistent_correct += o.consistent_correct;
  hidden_defects += o.hidden_defects;
  undetected += o.undetected;
  return *this;
}

Rate mvr(const Counts& c) noexcept { return {c.violations, c.evaluable}; }
Rate acc_static(const Counts& c) noexcept { return {c.static_correct, c.with_gold}; }
Rate acc_cons(const Counts& c) noexcept { return {c.consistent_correct, c.with_gold}; }
Rate hdr(const Counts& c) noexcept { return {c.hidden_defects, c.with_gold}; }
Rate fur(const Counts& c) noexcept { return {c.undetected, c.with_gold}; }

std::string format_percent(const Rate& r) {
  if (!r.defined()) return "-";
  // hundredths of a percent, rounded half up in integer arithmetic
  const std::uint64_t h = (r.num * 20000 + r.den) / (2 * r.den);
  std::ostringstream os;
  os << h / 100 << '.' << (h % 100 < 10 ? "0" : "") << h % 100 << '%';
  return os.str();
}

MetricsSummary summarize(const std::vector<GroupOutcome>& outcomes, ParsePolicy policy) {
  if (outcomes.empty()) throw EmptyInput("no group outcomes to summarize");
  MetricsSummary s;
  for (const auto& o : outcomes) {
    s.overall.add(o, policy);
    s.per_mr[o.mr].add(o, policy);
    s.per_category[category(o.mr)].add(o, policy);
  }
  return s;
}

AuditSummary summarize_audit(const std::vector<AuditFlag>& flags) {
  if (flags.empty()) throw EmptyInput("no audited items");
  AuditSummary a;
  a.inspected = flags.size();
  for (auto f : flags) {
    if (f == AuditFlag::Drift) ++a.fp_drift;
    if (f == AuditFlag::Parse) ++a.fp_parse;
  }
  return a;
}

const char* to_string(ReportFormat f) noexcept {
  switch (f) {
    case ReportFormat::TableText: return "table-text";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Structured: return "structured";
  }
  return "?";
}

std::optional<ReportFormat> report_format_from_string(std::string_view s) noexcept {
  for (auto f : {ReportFormat::TableText, ReportFormat::Csv, ReportFormat::Structured})
    if (s == to_string(f)) return f;
  if (s == "json") return ReportFormat::Structured;
  return std::nullopt;
}

std::string emit_report(const Report& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::TableText: return text_report(report);
    case ReportFormat::Csv: return csv_report(report);
    case ReportFormat::Structured: return structured_report(report);
  }
  return {};
}

void write_report(const std::filesystem::path& path, const Report& report, ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report " + path.string());
  out << emit_report(report, format);
  if (!out) throw IoError("error while writing report " + path.string());
}

Report load_csv_report(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("csv report has an unexpected header");
  Report report;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split_csv(line);
    auto fail = [&](const std::string& why) {
      return ConfigError("csv report line " + std::to_string(lineno) + ": " + why);
    };
    if (f.size() != 17) throw fail("expected 17 fields");
    Counts c;
    std::uint64_t* slots[] = {&c.groups,     &c.parse_excluded, &c.evaluable,          &c.violations,
                              &c.with_gold,  &c.static_correct, &c.consistent_correct, &c.hidden_defects,
                              &c.undetected};
    for (std::size_t i = 0; i < 9; ++i) {
      try {
        std::size_t used = 0;
        *slots[i] = std::stoull(f[3 + i], &used);
        if (used != f[3 + i].size()) throw fail("bad count " + f[3 + i]);
      } catch (const std::logic_error&) {
        throw fail("bad count " + f[3 + i]);
      }
    }
    auto& s = report[f[0]];
    if (f[1] == "overall") {
      s.overall = c;
    } else if (f[1] == "category") {
      bool found = false;
      for (auto cat : kAllCategories)
        if (f[2] == to_string(cat)) {
          s.per_category[cat] = c;
          found = true;
        }
      if (!found) throw fail("unknown category " + f[2]);
    } else if (f[1] == "mr") {
      auto mr = mr_from_string(f[2]);
      if (!mr) throw fail("unknown relation " + f[2]);
      s.per_mr[*mr] = c;
    } else {
      throw fail("unknown scope " + f[1]);
    }
  }
  return report;
}

}  // namespace folmt
