#include "folmt/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "folmt/entailment.hpp"
#include "folmt/errors.hpp"
#include "folmt/metrics.hpp"
#include "folmt/random.hpp"

namespace folmt {

namespace {

namespace fs = std::filesystem;

template <class T>
const T& need(const std::optional<T>& v, const char* field) {
  if (!v) throw ConfigError(std::string("config: missing field '") + field + "'");
  return *v;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return (path.is_absolute() || base.empty() ? path : base / path).lexically_normal();
}

std::size_t count_field(const nlohmann::json& j, const char* field) {
  if (!j.is_number_unsigned()) throw ConfigError(std::string("config: field '") + field + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

std::string verdict_text(const Verdict& v) {
  std::ostringstream os;
  os << to_string(v.label) << " (" << to_string(v.completeness) << ", domains 1.." << v.max_domain;
  if (!v.premises_consistent) os << ", premises inconsistent";
  os << ")";
  return os.str();
}

std::size_t parse_max_domain(const std::string& text, const std::vector<Formula>& formulas) {
  if (text == "auto") return auto_domain_bound(formulas);
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(text, &used);
    if (used == text.size() && v > 0) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("--max-domain expects a positive integer or 'auto', got '" + text + "'");
}

const SourceRecord& find_record(const std::vector<SourceRecord>& records, const std::string& id) {
  for (const auto& r : records)
    if (r.id == id) return r;
  throw ConfigError("no record with id '" + id + "'");
}

std::vector<SutConfig> select_suts(const CliConfig& cfg, const std::vector<std::string>& names) {
  if (names.empty()) return cfg.suts;
  std::vector<SutConfig> out;
  for (const auto& n : names) {
    auto it = std::find_if(cfg.suts.begin(), cfg.suts.end(), [&](const SutConfig& s) { return s.name == n; });
    if (it == cfg.suts.end()) throw ConfigError("--sut: no SUT named '" + n + "' in config");
    out.push_back(*it);
  }
  return out;
}

void print_counts(std::ostream& out, const std::map<MrId, std::size_t>& a, const std::map<MrId, std::size_t>* b,
                  const char* a_name, const char* b_name) {
  for (auto mr : kAllMrs) {
    auto ia = a.find(mr);
    if (ia == a.end() && (!b || !b->count(mr))) continue;
    out << display_name(mr) << '\t' << a_name << ' ' << (ia == a.end() ? 0 : ia->second);
    if (b) {
      auto ib = b->find(mr);
      out << '\t' << b_name << ' ' << (ib == b->end() ? 0 : ib->second);
    }
    out << '\n';
  }
}

const char* flag_name(AuditFlag f) {
  switch (f) {
    case AuditFlag::None: return "none";
    case AuditFlag::Drift: return "drift";
    case AuditFlag::Parse: return "parse";
  }
  return "?";
}

// A formula such as "-(P(a) & Q(b))" would be read as an option. Values of
// --premise/--conclusion are glued on with '=', anything else moves behind "--".
std::vector<std::string> protect_formulas(const std::vector<std::string>& args) {
  auto looks_like_option = [](const std::string& a) {
    std::size_t i = a.rfind("--", 0) == 0 ? 2 : 1;
    if (i >= a.size() || !std::isalpha(static_cast<unsigned char>(a[i]))) return false;
    for (; i < a.size() && a[i] != '='; ++i)
      if (!std::isalnum(static_cast<unsigned char>(a[i])) && a[i] != '-' && a[i] != '_') return false;
    return true;
  };
  std::vector<std::string> out, tail;
  for (const auto& a : args) {
    if (a == "--") break;
    if (a.size() < 2 || a[0] != '-' || looks_like_option(a)) {
      out.push_back(a);
    } else if (!out.empty() && (out.back() == "--premise" || out.back() == "--conclusion")) {
      out.back() += "=" + a;
    } else {
      tail.push_back(a);
    }
  }
  auto dd = std::find(args.begin(), args.end(), "--");
  if (dd != args.end()) tail.insert(tail.end(), dd + 1, args.end());
  if (!tail.empty()) {
    out.push_back("--");
    out.insert(out.end(), tail.begin(), tail.end());
  }
  return out;
}

// Shared flag values; subcommands bind only the ones they accept.
struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> mrs;
  std::optional<std::string> strategy;
  std::vector<std::string> suts;
  std::optional<std::string> max_domain;
  std::optional<std::string> format;
  std::string formula;
  std::string input;
  std::string id;
  std::vector<std::string> premises;
  std::string conclusion;
};

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int parse(const Flags& f) {
    const Formula phi = parse_formula(f.formula);
    out_ << print_formula(phi) << '\n' << dump_ast(phi);
    return kExitOk;
  }

  int normalize(const Flags& f) {
    NormalizeOptions opts;
    opts.shuffle_seed = f.seed;
    const auto n = normalize_np(parse_formula(f.formula), opts);
    out_ << print_formula(n.result) << '\n' << "steps: " << n.trace.size() << '\n';
    for (const auto& s : n.trace) out_ << format_step(s) << '\n';
    return kExitOk;
  }

  int transform(const Flags& f) {
    if (f.mrs.size() != 1) throw ConfigError("transform takes exactly one --mr");
    const MrId mr = parse_mr(f.mrs.front());
    const std::uint64_t seed = f.seed.value_or(0);
    if (!f.formula.empty()) {
      if (!is_formula_level(mr))
        throw ConfigError(display_name(mr) + " acts on test cases; pass --input and --id instead of a formula");
      const Formula phi = parse_formula(f.formula);
      auto redexes = find_redexes(phi, mr);
      if (redexes.empty()) throw NotApplicable(display_name(mr) + " has no redex in " + print_formula(phi));
      std::size_t pick = 0;
      if (f.seed) {
        Rng rng(seed);
        pick = uniform_index(rng, redexes.size());
      }
      RewriteStep step{phi, apply(phi, redexes[pick]), redexes[pick], measure(phi), {}};
      step.measure_after = measure(step.after);
      out_ << print_formula(step.after) << '\n' << format_step(step) << '\n';
      return kExitOk;
    }
    const auto records = load_records(f);
    const SourceRecord& rec = pick_record(records, f.id);
    PipelineOptions opts = pipeline_options(f);
    out_ << group_to_json(apply_mr(rec, mr, seed, opts)).dump(2) << '\n';
    return kExitOk;
  }

  int check(const Flags& f) {
    if (!f.conclusion.empty()) {
      std::vector<Formula> gamma;
      for (const auto& p : f.premises) gamma.push_back(parse_formula(p));
      const Formula q = parse_formula(f.conclusion);
      out_ << verdict_text(run_check(f, gamma, q)) << '\n';
      return kExitOk;
    }
    if (!f.premises.empty()) throw ConfigError("--premise needs --conclusion");
    const auto records = load_records(f);
    std::vector<const SourceRecord*> todo;
    if (!f.id.empty()) {
      todo.push_back(&find_record(records, f.id));
    } else {
      for (const auto& r : records) todo.push_back(&r);
    }
    int code = kExitOk;
    for (const auto* r : todo) {
      const Verdict v = run_check(f, r->premises_fol, r->conclusion_fol);
      out_ << r->id << '\t' << verdict_text(v);
      if (r->gold_label) {
        const bool agree = *r->gold_label == v.label;
        out_ << "\tgold " << to_string(*r->gold_label) << (agree ? "\tagree" : "\tDISAGREE");
        if (!agree) code = kExitViolations;
      }
      out_ << '\n';
    }
    return code;
  }

  int generate(const Flags& f) {
    const CliConfig cfg = config(f);
    const auto records = load_dataset_checked(need(cfg.dataset, "dataset"));
    const std::uint64_t seed = f.seed ? *f.seed : need(cfg.seed, "seed");
    std::vector<MrId> mrs = cfg.mrs;
    if (!f.mrs.empty()) {
      mrs.clear();
      for (const auto& m : f.mrs) mrs.push_back(parse_mr(m));
    }
    PipelineOptions opts;
    opts.rewrite_conclusion = cfg.rewrite_conclusion;
    opts.max_domain = f.max_domain ? parse_max_domain(*f.max_domain, {}) : cfg.max_domain;
    const Pool pool = generate_pool(records, mrs, seed, opts);
    const auto& path = need(cfg.pool, "pool");
    ensure_parent(path);
    write_groups(path, pool.groups);
    print_counts(out_, pool.applicable, &pool.skipped, "generated", "skipped");
    out_ << "pool\t" << pool.groups.size() << " groups from " << records.size() << " records -> " << path.string()
         << '\n';
    return kExitOk;
  }

  int sample(const Flags& f) {
    const CliConfig cfg = config(f);
    const auto pool = load_groups(need(cfg.pool, "pool"));
    SamplePlan plan;
    plan.per_subrule_cap = cfg.sample_cap;
    plan.category_minimum = cfg.category_minimum;
    plan.rng_seed = f.seed ? *f.seed : need(cfg.seed, "seed");
    const Sample s = sample_pool(pool, plan);
    const auto& path = need(cfg.samples, "samples");
    ensure_parent(path);
    write_groups(path, s.groups);
    print_counts(out_, s.per_mr, nullptr, "sampled", "");
    for (auto c : kAllCategories) out_ << to_string(c) << '\t' << s.per_category.at(c) << '\n';
    for (const auto& w : s.warnings) err_ << "warning: " << w << '\n';
    out_ << "sample\t" << s.groups.size() << " of " << pool.size() << " groups -> " << path.string() << '\n';
    return kExitOk;
  }

  int run(const Flags& f) {
    const CliConfig cfg = config(f);
    const auto groups = load_groups(need(cfg.samples, "samples"));
    const auto& log = need(cfg.run_log, "run_log");
    ensure_parent(log);
    RunOptions opts;
    opts.strategy = strategy(f, cfg);
    opts.strict_parse = cfg.strict_parse;
    opts.workers = cfg.workers;
    const auto suts = select_suts(cfg, f.suts);
    if (suts.empty()) throw ConfigError("config: missing field 'suts'");
    for (const auto& sut : suts) {
      auto reasoner = make_reasoner(sut);
      const RunStats st = run_groups(groups, sut, *reasoner, opts, log);
      out_ << sut.name << '\t' << to_string(opts.strategy) << "\tqueried " << st.queried << "\tskipped "
           << st.skipped << "\tparse errors " << st.parse_errors << '\n';
    }
    return kExitOk;
  }

  int audit(const Flags& f) {
    const CliConfig cfg = config(f);
    const auto groups = load_groups(need(cfg.samples, "samples"));
    const auto records = RunLog::load(need(cfg.run_log, "run_log"));
    const auto auditor = make_auditor(need(cfg.auditor, "auditor"));
    const PromptStrategy strat = strategy(f, cfg);
    const std::uint64_t seed = f.seed ? *f.seed : cfg.seed.value_or(0);
    std::map<std::string, const MetamorphicGroup*> by_id;
    for (const auto& g : groups) by_id[g.id] = &g;

    nlohmann::json log = nlohmann::json::array();
    for (const auto& name : sut_names(cfg, f, records)) {
      std::vector<GroupOutcome> inspected;
      for (auto& o : collect_outcomes(groups, records, name, strat))
        if (o.violation || o.parse_issue) inspected.push_back(std::move(o));
      if (cfg.audit_sample && inspected.size() > cfg.audit_sample) {
        Rng rng(Fnv1a().add("audit").add(seed).add(name).digest());
        seeded_shuffle(inspected, rng);
        inspected.resize(cfg.audit_sample);
        std::sort(inspected.begin(), inspected.end(),
                  [](const GroupOutcome& a, const GroupOutcome& b) { return a.mg_id < b.mg_id; });
      }
      std::vector<AuditFlag> flags;
      for (const auto& o : inspected) {
        const auto& g = *by_id.at(o.mg_id);
        AuditFlag flag = AuditFlag::None;
        nlohmann::json items = nlohmann::json::array();
        if (o.parse_issue) {
          flag = AuditFlag::Parse;
        } else {
          auto check_item = [&](const Formula& phi, const std::string& nl, const std::string& where) {
            const std::string fol = print_formula(phi);
            const ParsedLabel l = audit_translation(fol, nl, *auditor);
            items.push_back({{"where", where}, {"fol", fol}, {"nl", nl}, {"verdict", to_string(l)}});
            if (l == ParsedLabel::False) flag = AuditFlag::Drift;
          };
          for (auto i : g.changed_premises)
            check_item(g.follow_up.premises_fol.at(i), g.follow_up.premises_nl.at(i), "premise " + std::to_string(i));
          if (g.conclusion_changed) check_item(g.follow_up.conclusion_fol, g.follow_up.conclusion_nl, "conclusion");
        }
        flags.push_back(flag);
        log.push_back({{"sut", name}, {"mg_id", o.mg_id}, {"mr", display_name(o.mr)}, {"flag", flag_name(flag)},
                       {"items", items}});
      }
      if (flags.empty()) {
        out_ << name << "\tno violations to audit\n";
        continue;
      }
      const AuditSummary a = summarize_audit(flags);
      out_ << name << "\tinspected " << a.inspected << "\tdrift " << a.fp_drift << "\tparse " << a.fp_parse
           << "\tFRR " << format_percent(a.frr()) << '\n';
    }
    if (cfg.report_dir) {
      fs::create_directories(*cfg.report_dir);
      std::ofstream o(*cfg.report_dir / "audit.jsonl", std::ios::binary);
      for (const auto& e : log) o << e.dump() << '\n';
      if (!o) throw IoError("cannot write " + (*cfg.report_dir / "audit.jsonl").string());
    }
    return kExitOk;
  }

  int report(const Flags& f) {
    const CliConfig cfg = config(f);
    const auto groups = load_groups(need(cfg.samples, "samples"));
    const auto records = RunLog::load(need(cfg.run_log, "run_log"));
    const PromptStrategy strat = strategy(f, cfg);
    Report rep;
    for (const auto& name : sut_names(cfg, f, records)) {
      const auto outcomes = collect_outcomes(groups, records, name, strat);
      if (outcomes.empty()) {
        err_ << "warning: no answered groups for " << name << " (" << to_string(strat) << ")\n";
        continue;
      }
      rep[name] = summarize(outcomes, cfg.parse_errors);
    }
    if (rep.empty()) throw EmptyInput("run log has no answered groups for the selected SUTs");

    std::vector<ReportFormat> formats{ReportFormat::TableText, ReportFormat::Csv, ReportFormat::Structured};
    if (f.format) {
      auto fmt = report_format_from_string(*f.format);
      if (!fmt) throw ConfigError("--format expects table-text, csv or structured, got '" + *f.format + "'");
      formats = {*fmt};
    }
    if (cfg.report_dir) {
      fs::create_directories(*cfg.report_dir);
      for (auto fmt : formats) write_report(*cfg.report_dir / report_file(fmt), rep, fmt);
    }
    out_ << emit_report(rep, formats.front());
    std::uint64_t violations = 0;
    for (const auto& [name, s] : rep) violations += s.overall.violations;
    return violations ? kExitViolations : kExitOk;
  }

 private:
  static MrId parse_mr(const std::string& s) {
    auto mr = mr_from_string(s);
    if (!mr) throw ConfigError("unknown relation '" + s + "'");
    return *mr;
  }

  static const char* report_file(ReportFormat f) {
    switch (f) {
      case ReportFormat::TableText: return "report.txt";
      case ReportFormat::Csv: return "report.csv";
      case ReportFormat::Structured: return "report.json";
    }
    return "report";
  }

  static void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
  }

  CliConfig config(const Flags& f) const {
    if (f.config.empty()) throw ConfigError("--config is required");
    return load_cli_config(f.config);
  }

  static PromptStrategy strategy(const Flags& f, const CliConfig& cfg) {
    if (!f.strategy) return cfg.strategy;
    auto s = strategy_from_string(*f.strategy);
    if (!s) throw ConfigError("unknown strategy '" + *f.strategy + "'");
    return *s;
  }

  // Config SUTs (filtered by --sut); without any, every SUT in the log.
  static std::vector<std::string> sut_names(const CliConfig& cfg, const Flags& f,
                                            const std::vector<RunRecord>& records) {
    std::vector<std::string> names;
    if (!cfg.suts.empty()) {
      for (const auto& s : select_suts(cfg, f.suts)) names.push_back(s.name);
      return names;
    }
    std::set<std::string> seen;
    for (const auto& r : records) seen.insert(r.sut);
    for (const auto& n : seen)
      if (f.suts.empty() || std::count(f.suts.begin(), f.suts.end(), n)) names.push_back(n);
    return names;
  }

  PipelineOptions pipeline_options(const Flags& f) const {
    PipelineOptions opts;
    if (!f.config.empty()) {
      const CliConfig cfg = config(f);
      opts.rewrite_conclusion = cfg.rewrite_conclusion;
      opts.max_domain = cfg.max_domain;
    }
    if (f.max_domain) opts.max_domain = parse_max_domain(*f.max_domain, {});
    return opts;
  }

  std::vector<SourceRecord> load_dataset_checked(const fs::path& path) const {
    Dataset d = load_dataset(path);
    for (const auto& s : d.skipped)
      err_ << "warning: skipped record at line " << s.line << (s.id.empty() ? "" : " (" + s.id + ")") << ": "
           << s.reason << '\n';
    return std::move(d.records);
  }

  std::vector<SourceRecord> load_records(const Flags& f) const {
    if (!f.input.empty()) return load_dataset_checked(f.input);
    return load_dataset_checked(need(config(f).dataset, "dataset"));
  }

  static const SourceRecord& pick_record(const std::vector<SourceRecord>& records, const std::string& id) {
    if (!id.empty()) return find_record(records, id);
    if (records.size() != 1) throw ConfigError("input has " + std::to_string(records.size()) + " records; pass --id");
    return records.front();
  }

  Verdict run_check(const Flags& f, const std::vector<Formula>& gamma, const Formula& q) const {
    EntailmentOptions opts;
    std::vector<Formula> all = gamma;
    all.push_back(q);
    if (f.max_domain) {
      opts.max_domain = parse_max_domain(*f.max_domain, all);
    } else if (!f.config.empty()) {
      opts.max_domain = config(f).max_domain;
    }
    return entails(gamma, q, opts);
  }

  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

CliConfig cli_config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  CliConfig c;
  auto path_field = [&](const char* key, std::optional<fs::path>& slot) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) throw ConfigError(std::string("config: field '") + key + "' must be a string");
    slot = resolve(base_dir, j[key].get<std::string>());
  };
  path_field("dataset", c.dataset);
  path_field("pool", c.pool);
  path_field("samples", c.samples);
  path_field("run_log", c.run_log);
  path_field("report_dir", c.report_dir);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("config: field 'seed' must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("strategy")) {
    auto s = j["strategy"].is_string() ? strategy_from_string(j["strategy"].get<std::string>()) : std::nullopt;
    if (!s) throw ConfigError("config: field 'strategy' must be one of zero-shot, zero-shot-cot, few-shot, few-shot-cot");
    c.strategy = *s;
  }
  if (j.contains("max_domain")) {
    c.max_domain = count_field(j["max_domain"], "max_domain");
    if (c.max_domain == 0) throw ConfigError("config: field 'max_domain' must be positive");
  }
  if (j.contains("mrs")) {
    if (!j["mrs"].is_array()) throw ConfigError("config: field 'mrs' must be an array");
    c.mrs.clear();
    for (const auto& m : j["mrs"]) {
      auto mr = m.is_string() ? mr_from_string(m.get<std::string>()) : std::nullopt;
      if (!mr) throw ConfigError("config: field 'mrs' has an unknown relation " + m.dump());
      c.mrs.push_back(*mr);
    }
  }
  if (j.contains("rewrite_conclusion")) {
    if (!j["rewrite_conclusion"].is_boolean()) throw ConfigError("config: field 'rewrite_conclusion' must be a boolean");
    c.rewrite_conclusion = j["rewrite_conclusion"].get<bool>();
  }
  if (j.contains("sample")) {
    const auto& s = j["sample"];
    if (!s.is_object()) throw ConfigError("config: field 'sample' must be an object");
    if (s.contains("cap")) c.sample_cap = count_field(s["cap"], "sample.cap");
    if (s.contains("minimum")) c.category_minimum = count_field(s["minimum"], "sample.minimum");
  }
  if (j.contains("suts")) {
    if (!j["suts"].is_array()) throw ConfigError("config: field 'suts' must be an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < j["suts"].size(); ++i) {
      try {
        c.suts.push_back(sut_from_json(j["suts"][i]));
        if (c.suts.back().kind == "mock") ScriptedReasoner{c.suts.back().policy};
      } catch (const ConfigError& e) {
        throw ConfigError("config: suts[" + std::to_string(i) + "]: " + e.what());
      }
      if (!names.insert(c.suts.back().name).second)
        throw ConfigError("config: suts[" + std::to_string(i) + "]: duplicate name '" + c.suts.back().name + "'");
    }
  }
  if (j.contains("auditor")) {
    try {
      c.auditor = sut_from_json(j["auditor"]);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config: auditor: ") + e.what());
    }
  }
  if (j.contains("audit_sample")) c.audit_sample = count_field(j["audit_sample"], "audit_sample");
  if (j.contains("strict_parse")) {
    if (!j["strict_parse"].is_boolean()) throw ConfigError("config: field 'strict_parse' must be a boolean");
    c.strict_parse = j["strict_parse"].get<bool>();
  }
  if (j.contains("parse_errors")) {
    const auto& v = j["parse_errors"];
    if (v == "exclude") c.parse_errors = ParsePolicy::Exclude;
    else if (v == "include") c.parse_errors = ParsePolicy::Include;
    else throw ConfigError("config: field 'parse_errors' must be \"exclude\" or \"include\"");
  }
  if (j.contains("workers")) c.workers = count_field(j["workers"], "workers");
  return c;
}

CliConfig load_cli_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return cli_config_from_json(j, path.parent_path());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metamorphic testing toolkit for first-order logic reasoning", "folmt"};
  app.require_subcommand(1);
  Flags f;
  Cli cli(out, err);
  int code = kExitOk;

  auto add_config = [&](CLI::App* sc, bool required) {
    auto* o = sc->add_option("--config", f.config, "JSON config file");
    if (required) o->required();
  };
  auto add_seed = [&](CLI::App* sc, const char* what) { sc->add_option("--seed", f.seed, what); };
  auto add_max_domain = [&](CLI::App* sc) {
    sc->add_option("--max-domain", f.max_domain, "largest domain size checked, or 'auto'");
  };
  auto add_sut = [&](CLI::App* sc) {
    sc->add_option("--sut", f.suts, "restrict to these SUT names")->allow_extra_args(false);
  };
  auto add_strategy = [&](CLI::App* sc) {
    sc->add_option("--strategy", f.strategy, "zero-shot, zero-shot-cot, few-shot or few-shot-cot");
  };

  auto* parse = app.add_subcommand("parse", "print a formula and its syntax tree");
  parse->add_option("formula", f.formula)->required();

  auto* normalize = app.add_subcommand("normalize", "normal form with the rewrite trace");
  normalize->add_option("formula", f.formula)->required();
  add_seed(normalize, "pick redexes at random with this seed");

  auto* transform = app.add_subcommand("transform", "apply one relation to a formula or a record");
  transform->add_option("formula", f.formula, "formula for formula-level relations");
  transform->add_option("--mr", f.mrs, "relation name, e.g. E1_1")->required()->allow_extra_args(false);
  transform->add_option("--input", f.input, "line-delimited records");
  transform->add_option("--id", f.id, "record id");
  add_config(transform, false);
  add_seed(transform, "group seed");
  add_max_domain(transform);

  auto* check = app.add_subcommand("check", "bounded entailment verdict");
  check->add_option("--premise", f.premises, "premise formula (repeatable)")->allow_extra_args(false);
  check->add_option("--conclusion", f.conclusion, "conclusion formula");
  check->add_option("--input", f.input, "line-delimited records");
  check->add_option("--id", f.id, "record id");
  add_config(check, false);
  add_max_domain(check);

  auto* generate = app.add_subcommand("generate", "build the group pool from the dataset");
  add_config(generate, true);
  add_seed(generate, "pool seed");
  generate->add_option("--mr", f.mrs, "restrict to these relations")->allow_extra_args(false);
  add_max_domain(generate);

  auto* sample = app.add_subcommand("sample", "draw the evaluation sample from the pool");
  add_config(sample, true);
  add_seed(sample, "sampling seed");

  auto* run = app.add_subcommand("run", "query the SUTs on every sampled group");
  add_config(run, true);
  add_sut(run);
  add_strategy(run);

  auto* audit = app.add_subcommand("audit", "check translations behind reported violations");
  add_config(audit, true);
  add_sut(audit);
  add_strategy(audit);
  add_seed(audit, "audit sampling seed");

  auto* report = app.add_subcommand("report", "metrics from the run log");
  add_config(report, true);
  add_sut(report);
  add_strategy(report);
  report->add_option("--format", f.format, "table-text, csv or structured");

  try {
    const auto fixed = protect_formulas(args);
    std::vector<std::string> reversed(fixed.rbegin(), fixed.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*parse) code = cli.parse(f);
    else if (*normalize) code = cli.normalize(f);
    else if (*transform) code = cli.transform(f);
    else if (*check) code = cli.check(f);
    else if (*generate) code = cli.generate(f);
    else if (*sample) code = cli.sample(f);
    else if (*run) code = cli.run(f);
    else if (*audit) code = cli.audit(f);
    else if (*report) code = cli.report(f);
  } catch (const TransportError& e) {
    err << "error: " << e.what() << '\n';
    return kExitTransport;
  } catch (const MalformedResponse& e) {
    err << "error: " << e.what() << '\n';
    return kExitTransport;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return code;
}

}  // namespace folmt
