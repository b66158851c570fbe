#include <gtest/gtest.h>

#include <set>

#include "folmt/entailment.hpp"
#include "folmt/errors.hpp"
#include "folmt/pipeline.hpp"

namespace folmt {
namespace {

namespace fs = std::filesystem;

const Dataset& corpus() {
  static const Dataset ds = load_dataset(fs::path(FOLMT_SOURCE_DIR) / "data/desk_corpus.jsonl");
  return ds;
}

SourceRecord record(std::vector<const char*> premises, const char* conclusion, Label gold = Label::True) {
  SourceRecord r;
  r.id = "t";
  for (auto* p : premises) {
    r.premises_fol.push_back(parse_formula(p));
    r.premises_nl.push_back(std::string("nl: ") + p);
  }
  r.conclusion_fol = parse_formula(conclusion);
  r.conclusion_nl = "nl conclusion";
  r.gold_label = gold;
  return r;
}

Label oracle(const SourceRecord& r) {
  std::vector<Formula> all = r.premises_fol;
  all.push_back(r.conclusion_fol);
  EntailmentOptions o;
  o.max_domain = auto_domain_bound(all);
  return entails(r.premises_fol, r.conclusion_fol, o).label;
}

TEST(GroupId, StableAndDistinct) {
  EXPECT_EQ(group_id("a", MrId::P1, 1), group_id("a", MrId::P1, 1));
  EXPECT_EQ(group_id("a", MrId::P1, 1).size(), 16u);
  EXPECT_NE(group_id("a", MrId::P1, 1), group_id("a", MrId::P1, 2));
  EXPECT_NE(group_id("a", MrId::P1, 1), group_id("a", MrId::P2, 1));
  EXPECT_NE(group_id("a", MrId::P1, 1), group_id("b", MrId::P1, 1));
}

TEST(ApplyMr, FormulaRuleRewritesOnePremise) {
  const auto r = record({"P(a) -> Q(a)", "P(a)"}, "Q(a)");
  const auto g = apply_mr(r, MrId::E1_1, 3);
  EXPECT_EQ(g.follow_up.premises_fol[0], parse_formula("-P(a) | Q(a)"));
  EXPECT_EQ(g.follow_up.premises_nl[0], "either it is not the case that a has property P or a has property Q.");
  EXPECT_EQ(g.follow_up.premises_nl[1], "nl: P(a)");
  EXPECT_EQ(g.changed_premises, std::vector<std::size_t>{0});
  EXPECT_FALSE(g.conclusion_changed);
  EXPECT_EQ(g.follow_up.gold_label, Label::True);
  EXPECT_EQ(g.edit.rfind("premise 0\tE1_1\t", 0), 0u);
  EXPECT_THROW(apply_mr(r, MrId::E2_4, 3), NotApplicable);
}

TEST(ApplyMr, ConclusionOnlyWhenAsked) {
  const auto r = record({"P(a)"}, "--P(a)");
  EXPECT_THROW(apply_mr(r, MrId::E1_2, 1), NotApplicable);
  EXPECT_FALSE(mr_applicable(r, MrId::E1_2));
  PipelineOptions o;
  o.rewrite_conclusion = true;
  EXPECT_TRUE(mr_applicable(r, MrId::E1_2, o));
  const auto g = apply_mr(r, MrId::E1_2, 1, o);
  EXPECT_TRUE(g.conclusion_changed);
  EXPECT_EQ(g.follow_up.conclusion_fol, parse_formula("P(a)"));
}

TEST(ApplyMr, Renaming) {
  const auto r = record({"forall x. (Cat(x) -> Animal(x))", "Cat(tom)"}, "Animal(tom)");
  const auto s1 = apply_mr(r, MrId::S1, 5);
  EXPECT_EQ(s1.follow_up.premises_fol[1], parse_formula("Cat(Con1)"));
  EXPECT_EQ(s1.follow_up.conclusion_fol, parse_formula("Animal(Con1)"));
  EXPECT_EQ(s1.changed_premises, std::vector<std::size_t>{1});
  const auto s2 = apply_mr(r, MrId::S2, 5);
  EXPECT_TRUE(s2.edit.find("-> Pre1") != std::string::npos) << s2.edit;
  EXPECT_THROW(apply_mr(record({"forall x. P(x)"}, "exists x. P(x)"), MrId::S1, 1), NotApplicable);
}

TEST(ApplyMr, PremiseRules) {
  const auto r = record({"P(a) & Q(b)", "R(a, b)", "S(c)"}, "P(a)");
  const auto p1 = apply_mr(r, MrId::P1, 2);
  EXPECT_NE(p1.follow_up.premises_fol, r.premises_fol);
  EXPECT_EQ(std::multiset<std::string>(p1.follow_up.premises_nl.begin(), p1.follow_up.premises_nl.end()),
            std::multiset<std::string>(r.premises_nl.begin(), r.premises_nl.end()));
  EXPECT_TRUE(p1.changed_premises.empty());

  const auto p2 = apply_mr(r, MrId::P2, 2);
  ASSERT_EQ(p2.follow_up.premises_fol.size(), 4u);
  EXPECT_NE(std::find(r.premises_nl.begin(), r.premises_nl.end(), p2.follow_up.premises_nl[3]), r.premises_nl.end());

  const auto p3 = apply_mr(r, MrId::P3, 2);
  EXPECT_EQ(p3.follow_up.premises_fol.back(), parse_formula("Pad1(padObj1)"));
  EXPECT_EQ(p3.changed_premises, std::vector<std::size_t>{3});

  const auto p4 = apply_mr(r, MrId::P4, 2);
  EXPECT_EQ(p4.follow_up.premises_fol.back().kind(), FormulaKind::And);

  const auto p5 = apply_mr(r, MrId::P5, 2);
  ASSERT_EQ(p5.follow_up.premises_fol.size(), 5u);
  EXPECT_EQ(p5.follow_up.premises_fol[3], parse_formula("P(a)"));
  EXPECT_EQ(p5.follow_up.premises_fol[4], parse_formula("Q(b)"));

  const auto single = record({"P(a)"}, "P(a)");
  EXPECT_THROW(apply_mr(single, MrId::P1, 1), NotApplicable);
  EXPECT_THROW(apply_mr(single, MrId::P4, 1), NotApplicable);
  EXPECT_THROW(apply_mr(single, MrId::P5, 1), NotApplicable);
}

TEST(ApplyMr, P3NeedsConsistentPremises) {
  const auto r = record({"P(a)", "-P(a)"}, "Q(a)", Label::Unknown);
  EXPECT_TRUE(mr_applicable(r, MrId::P3));
  EXPECT_THROW(apply_mr(r, MrId::P3, 1), NotApplicable);
  // fresh names avoid the record's own symbols
  const auto taken = record({"Pad1(padObj1)"}, "Pad1(padObj1)");
  EXPECT_EQ(apply_mr(taken, MrId::P3, 1).follow_up.premises_fol.back(), parse_formula("Pad2(padObj2)"));
}

TEST(ApplyMr, ConclusionRules) {
  const auto r = record({"P(a)"}, "P(a)");
  EXPECT_EQ(apply_mr(r, MrId::C1, 1).follow_up.conclusion_fol, parse_formula("P(a) & 1"));
  EXPECT_EQ(apply_mr(r, MrId::C2, 1).follow_up.conclusion_fol, parse_formula("P(a) | 0"));
  const auto c3 = apply_mr(r, MrId::C3, 1);
  EXPECT_EQ(c3.follow_up.conclusion_fol, parse_formula("--P(a)"));
  EXPECT_EQ(c3.follow_up.conclusion_nl, "it is not the case that it is not the case that a has property P.");
  EXPECT_THROW(apply_mr(record({"P(a)"}, "P(a) & 1"), MrId::C1, 1), NotApplicable);
  EXPECT_THROW(apply_mr(record({"P(a)"}, "P(a) | 0"), MrId::C2, 1), NotApplicable);
}

TEST(ApplyMr, DeterministicPerSeed) {
  const auto& r = corpus().records.front();
  for (auto mr : kAllMrs) {
    if (!mr_applicable(r, mr)) continue;
    EXPECT_EQ(group_to_json(apply_mr(r, mr, 11)), group_to_json(apply_mr(r, mr, 11))) << to_string(mr);
  }
}

TEST(Pool, OracleInvariantOnCorpus) {
  PipelineOptions o;
  o.rewrite_conclusion = true;
  const auto pool = generate_pool(corpus().records, {kAllMrs.begin(), kAllMrs.end()}, 20240601, o);
  ASSERT_GT(pool.groups.size(), 400u);
  std::set<MrId> seen;
  for (const auto& g : pool.groups) {
    seen.insert(g.mr);
    ASSERT_EQ(oracle(g.follow_up), oracle(g.source)) << g.id << " " << to_string(g.mr) << " " << g.edit;
    ASSERT_EQ(g.follow_up.gold_label, g.source.gold_label);
  }
  EXPECT_EQ(seen.size(), kAllMrs.size());
  EXPECT_TRUE(std::is_sorted(pool.groups.begin(), pool.groups.end(),
                             [](const auto& a, const auto& b) { return a.id < b.id; }));
  for (auto mr : kAllMrs) EXPECT_EQ(pool.applicable.at(mr) + pool.skipped.at(mr), corpus().records.size());
}

TEST(Groups, JsonAndFileRoundTrip) {
  const auto pool = generate_pool(corpus().records, {MrId::E1_1, MrId::P5, MrId::S2}, 4);
  const auto dir = fs::temp_directory_path() / ("folmt_pipeline_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  write_groups(dir / "pool.jsonl", pool.groups);
  const auto back = load_groups(dir / "pool.jsonl");
  ASSERT_EQ(back.size(), pool.groups.size());
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(group_to_json(back[i]), group_to_json(pool.groups[i]));
  EXPECT_THROW(load_groups(dir / "absent.jsonl"), IoError);
  EXPECT_THROW(group_from_json({{"id", "x"}}), ConfigError);
}

TEST(Sample, CapsAndDeterminism) {
  const auto pool = generate_pool(corpus().records, {kAllMrs.begin(), kAllMrs.end()}, 1);
  SamplePlan plan;
  plan.per_subrule_cap = 10;
  plan.rng_seed = 99;
  plan.category_minimum = 50;
  const auto s = sample_pool(pool.groups, plan);
  std::map<MrId, std::size_t> avail;
  for (const auto& g : pool.groups) ++avail[g.mr];
  for (const auto& [mr, n] : avail) EXPECT_EQ(s.per_mr.at(mr), std::min<std::size_t>(10, n)) << to_string(mr);
  std::size_t total = 0;
  for (const auto& [c, n] : s.per_category) total += n;
  EXPECT_EQ(total, s.groups.size());
  // E has ten relations but several have few redexes in the corpus
  EXPECT_FALSE(s.warnings.empty());

  const auto again = sample_pool(pool.groups, plan);
  ASSERT_EQ(again.groups.size(), s.groups.size());
  for (std::size_t i = 0; i < s.groups.size(); ++i) EXPECT_EQ(again.groups[i].id, s.groups[i].id);
  plan.rng_seed = 100;
  const auto other = sample_pool(pool.groups, plan);
  bool differs = false;
  for (std::size_t i = 0; i < s.groups.size(); ++i) differs |= other.groups[i].id != s.groups[i].id;
  EXPECT_TRUE(differs);
  std::set<std::string> ids;
  for (const auto& g : s.groups) EXPECT_TRUE(ids.insert(g.id).second);
}

}  // namespace
}  // namespace folmt
