// One PASS/FAIL line per acceptance criterion; exit status 1 if any fail.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "folmt/cli.hpp"
#include "folmt/entailment.hpp"
#include "folmt/errors.hpp"
#include "folmt/metrics.hpp"
#include "folmt/pipeline.hpp"
#include "folmt/realizer.hpp"
#include "folmt/rewrite.hpp"
#include "folmt/syntax.hpp"
#include "formula_gen.hpp"

using namespace folmt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

Formula F(const char* s) { return parse_formula(s); }

const fs::path kSource = FOLMT_SOURCE_DIR;

Outcome np_termination() {
  Rng rng(1001);
  testing::GenOptions g;  // depth <= 8, 6 predicates
  std::size_t steps = 0, longest = 0;
  for (int i = 0; i < 1000; ++i) {
    const Formula phi = testing::random_formula(rng, g);
    Normalization n;
    try {
      n = normalize_np(phi);
    } catch (const Error& e) {
      return fail("formula " + std::to_string(i) + ": " + e.what());
    }
    for (const auto& s : n.trace)
      if (!(s.measure_after < s.measure_before)) return fail("no strict decrease: " + format_step(s));
    steps += n.trace.size();
    longest = std::max(longest, n.trace.size());
  }
  return {true, "1000 formulas, " + std::to_string(steps) + " steps, longest " + std::to_string(longest)};
}

Outcome np_uniqueness() {
  Rng rng(2002);
  for (int i = 0; i < 300; ++i) {
    const Formula phi = testing::random_formula(rng);
    std::vector<Formula> forms;
    for (std::uint64_t k = 0; k < 6; ++k) {
      NormalizeOptions o;
      o.shuffle_seed = 0x9e3779b97f4a7c15ULL * (k + 1) + static_cast<std::uint64_t>(i);
      forms.push_back(normalize_np(phi, o).result);
      if (!measure(forms.back()).is_zero()) return fail("nonzero measure for " + print_formula(phi));
    }
    for (std::size_t a = 0; a < forms.size(); ++a)
      for (std::size_t b = a + 1; b < forms.size(); ++b)
        if (!alpha_equal(forms[a], forms[b]))
          return fail(print_formula(forms[a]) + " vs " + print_formula(forms[b]));
  }
  return {true, "300 formulas x 6 strategies"};
}

Outcome semantic_preservation() {
  Rng rng(3003);
  testing::GenOptions g;
  g.max_depth = 5;
  g.predicates = 4;
  g.monadic = true;
  EntailmentOptions eo;
  eo.max_domain = 3;
  std::size_t applied = 0, ground = 0;
  std::map<MrId, std::size_t> per_rule;
  std::vector<MrId> rules;
  for (auto mr : kAllMrs)
    if (is_formula_level(mr)) rules.push_back(mr);
  while (applied < 2000) {
    g.ground = applied % 2 == 1;
    const Formula phi = testing::random_formula(rng, g);
    const MrId mr = rules[uniform_index(rng, rules.size())];
    const auto redexes = find_redexes(phi, mr);
    if (redexes.empty()) continue;
    const Formula psi = apply(phi, redexes[uniform_index(rng, redexes.size())]);
    // identical truth sets <=> no structure of size 1..3 separates them
    if (consistent({negation(biconditional(phi, psi))}, eo).consistent)
      return fail(std::string(to_string(mr)) + ": " + print_formula(phi) + " => " + print_formula(psi));
    ++applied;
    ++per_rule[mr];
    ground += g.ground;
  }
  return {true, "2000 applications (" + std::to_string(ground) + " ground), " + std::to_string(per_rule.size()) +
                    " rules, domains 1..3"};
}

Outcome oracle_goldens() {
  struct Case {
    std::vector<const char*> premises;
    const char* conclusion;
    Label expected;
  };
  const std::vector<Case> cases{
      {{"Online(centralServer) -> Syncs(database)", "Online(centralServer)"}, "Syncs(database)", Label::True},
      {{"forall x. (Bird(x) -> -Mammal(x))", "Mammal(bat)"}, "Bird(bat)", Label::False},
      {{"forall x. (Manager(x) -> HasPrivateOffice(x))", "HasPrivateOffice(alice)"}, "Manager(alice)", Label::Unknown},
      {{"NeighbourhoodIn(lawtonPark, seattle)", "forall x. (ResidentOf(x, lawtonPark) -> UseZipCode(x, num98199))",
        "ResidentOf(tom, lawtonPark)", "UseZipCode(daniel, num98199)"},
       "ResidentOf(daniel, lawtonPark)",
       Label::Unknown},
  };
  for (const auto& c : cases) {
    std::vector<Formula> gamma;
    for (auto* p : c.premises) gamma.push_back(F(p));
    const auto v = entails(gamma, F(c.conclusion));
    if (v.label != c.expected)
      return fail(std::string(c.conclusion) + ": got " + to_string(v.label) + ", want " + to_string(c.expected));
  }
  return {true, "True, False, Unknown, Unknown"};
}

Outcome realizer_goldens() {
  const std::vector<std::pair<const char*, const char*>> cases{
      {"--Orange(Stanley)", "it is not the case that it is not the case that Stanley is Orange."},
      {"(-Pre4(x) & Pre1(x))", "both it is not the case that x has property Pre4, and x has property Pre1."},
      {"all x. (Bitter(x) -> -Dull(x))", "For all x, if x is Bitter, then it is not the case that x is Dull."},
      {"(P(Con1) <-> (Q(Con2) | 0))",
       "Con1 has property P if and only if, either Con2 has property Q or it is logically false."},
  };
  for (const auto& [fol, want] : cases) {
    const auto got = realize(F(fol));
    if (got != want) return fail(std::string(fol) + ": got \"" + got + "\"");
  }
  return {true, "4 of 4 byte-exact"};
}

GroupOutcome synthetic(ParsedLabel s, ParsedLabel f) {
  return make_outcome("g", MrId::E1_1, Label::True, s, f);
}

Outcome metric_arithmetic() {
  std::vector<GroupOutcome> mvr_list;
  for (int i = 0; i < 3091; ++i)
    mvr_list.push_back(synthetic(ParsedLabel::True, i < 827 ? ParsedLabel::False : ParsedLabel::True));
  const auto m = format_percent(mvr(summarize(mvr_list).overall));
  if (m != "26.76%") return fail("MVR " + m);

  // 73.34% static accuracy, 56.84% consistent accuracy over 10000 groups
  std::vector<GroupOutcome> acc;
  for (int i = 0; i < 10000; ++i) {
    if (i < 5684)
      acc.push_back(synthetic(ParsedLabel::True, ParsedLabel::True));
    else if (i < 7334)
      acc.push_back(synthetic(ParsedLabel::True, ParsedLabel::Unknown));
    else
      acc.push_back(synthetic(ParsedLabel::False, ParsedLabel::False));
  }
  const auto c = summarize(acc).overall;
  const auto h = format_percent(hdr(c));
  if (format_percent(acc_static(c)) != "73.34%" || format_percent(acc_cons(c)) != "56.84%" || h != "16.50%")
    return fail("HDR " + h);

  std::vector<AuditFlag> flags(360, AuditFlag::None);
  for (int i = 0; i < 4; ++i) flags[static_cast<std::size_t>(i * 50)] = AuditFlag::Drift;
  flags[300] = AuditFlag::Parse;
  const double frr = summarize_audit(flags).frr().value() * 100;
  if (std::abs(frr - 1.38) > 0.02) return fail("FRR " + std::to_string(frr));
  std::ostringstream os;
  os << "MVR " << m << ", HDR " << h << ", FRR " << format_percent(summarize_audit(flags).frr());
  return {true, os.str()};
}

Outcome end_to_end() {
  const auto dir = fs::temp_directory_path() / ("folmt_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const nlohmann::json cfg = {
      {"dataset", (kSource / "data/desk_corpus.jsonl").string()},
      {"pool", "pool.jsonl"},
      {"samples", "samples.jsonl"},
      {"run_log", "run_log.jsonl"},
      {"report_dir", "report"},
      {"seed", 20240601},
      {"sample", {{"cap", 200}, {"minimum", 385}}},
      {"suts", {{{"name", "flip-c"}, {"kind", "mock"}, {"policy", "flip-category:C"}}}}};
  std::ofstream(dir / "config.json") << cfg.dump(2);
  std::ostringstream out, err;
  for (const char* step : {"generate", "sample", "run"}) {
    const int rc = run_cli({step, "--config", (dir / "config.json").string()}, out, err);
    if (rc != kExitOk) return fail(std::string(step) + " exited " + std::to_string(rc) + ": " + err.str());
  }
  const int rc = run_cli({"report", "--config", (dir / "config.json").string(), "--format", "structured"}, out, err);
  if (rc != kExitViolations) return fail("report exited " + std::to_string(rc));

  // expected value straight from the sampled groups
  const auto samples = load_groups(dir / "samples.jsonl");
  std::uint64_t c_share = 0;
  for (const auto& g : samples) c_share += category(g.mr) == MrCategory::C;
  std::ifstream in(dir / "report" / "report.json");
  const auto j = nlohmann::json::parse(in)["suts"]["flip-c"]["overall"];
  if (j["violations"] != c_share || j["evaluable"] != samples.size())
    return fail("violations " + j["violations"].dump() + "/" + j["evaluable"].dump() + ", expected " +
                std::to_string(c_share) + "/" + std::to_string(samples.size()));
  if (j["undetected"] != 0) return fail("FUR numerator " + j["undetected"].dump());
  fs::remove_all(dir);
  return {true, "MVR " + j["rates"]["mvr"].get<std::string>() + " = " + std::to_string(c_share) + "/" +
                    std::to_string(samples.size()) + ", FUR " + j["rates"]["fur"].get<std::string>() + ", exit 1"};
}

bool decided_exactly(const SourceRecord& r, Label* label) {
  std::vector<Formula> all = r.premises_fol;
  all.push_back(r.conclusion_fol);
  EntailmentOptions o;
  o.max_domain = auto_domain_bound(all);
  const auto v = entails(r.premises_fol, r.conclusion_fol, o);
  *label = v.label;
  return v.completeness == Completeness::Exact;
}

Outcome mg_invariance() {
  const auto ds = load_dataset(kSource / "data/desk_corpus.jsonl");
  if (ds.records.size() != 50) return fail(std::to_string(ds.records.size()) + " records");
  PipelineOptions po;
  po.rewrite_conclusion = true;
  const auto pool = generate_pool(ds.records, {kAllMrs.begin(), kAllMrs.end()}, 20240601, po);
  std::size_t exact = 0, p3 = 0;
  for (const auto& g : pool.groups) {
    if (g.follow_up.gold_label != g.source.gold_label) return fail(g.id + ": gold label changed");
    Label ls, lf;
    const bool es = decided_exactly(g.source, &ls);
    const bool ef = decided_exactly(g.follow_up, &lf);
    if (es && ef) {
      ++exact;
      if (ls != lf) return fail(g.id + " " + to_string(g.mr) + ": oracle verdict changed");
    }
    if (g.mr == MrId::P3) {
      ++p3;
      if (!consistent(g.follow_up.premises_fol).consistent) return fail(g.id + ": P3 premises inconsistent");
      if (ls != lf) return fail(g.id + ": P3 changed the verdict");
    }
  }
  return {true, std::to_string(pool.groups.size()) + " groups, " + std::to_string(exact) + " decided exactly, " +
                    std::to_string(p3) + " P3"};
}

Outcome parser_round_trip() {
  Rng rng(9009);
  for (int i = 0; i < 10000; ++i) {
    const Formula phi = testing::random_formula(rng);
    const std::string text = print_formula(phi);
    Formula back;
    try {
      back = parse_formula(text);
    } catch (const SyntaxError& e) {
      return fail(text + ": " + e.what());
    }
    if (!(back == phi)) return fail(text + " reparsed as " + print_formula(back));
  }
  return {true, "10000 formulas"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"NP termination and strict decrease", np_termination},
      {"normal form unique up to alpha", np_uniqueness},
      {"E rules preserve bounded truth sets", semantic_preservation},
      {"oracle golden labels", oracle_goldens},
      {"realizer goldens", realizer_goldens},
      {"metric arithmetic", metric_arithmetic},
      {"end-to-end mock run", end_to_end},
      {"group invariance on the desk corpus", mg_invariance},
      {"parser round trip", parser_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::ostringstream t;
    t.precision(2);
    t << std::fixed << secs;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << o.detail << ", " << t.str() << " s)" << std::endl;
  }
  return failed ? 1 : 0;
}
