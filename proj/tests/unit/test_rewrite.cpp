#include <gtest/gtest.h>

#include <set>

#include "folmt/errors.hpp"
#include "folmt/rewrite.hpp"
#include "folmt/syntax.hpp"
#include "formula_gen.hpp"

namespace folmt {
namespace {

Formula F(const char* s) { return parse_formula(s); }

std::vector<Path> paths(const std::vector<Redex>& rs) {
  std::vector<Path> out;
  for (const auto& r : rs) out.push_back(r.path);
  return out;
}

TEST(MrNames, RoundTripAndCategories) {
  EXPECT_EQ(kAllMrs.size(), 20u);
  for (auto mr : kAllMrs) {
    EXPECT_EQ(mr_from_string(to_string(mr)), mr);
    EXPECT_EQ(mr_from_string(display_name(mr)), mr);
  }
  EXPECT_EQ(mr_from_string("E1.1"), MrId::E1_1);
  EXPECT_EQ(display_name(MrId::E2_3), "MR-E2.3");
  EXPECT_FALSE(mr_from_string("E9_9").has_value());
  EXPECT_EQ(category(MrId::E2_4), MrCategory::E);
  EXPECT_EQ(category(MrId::S2), MrCategory::S);
  EXPECT_EQ(category(MrId::P5), MrCategory::P);
  EXPECT_EQ(category(MrId::C3), MrCategory::C);
  EXPECT_TRUE(is_formula_level(MrId::E1_6));
  EXPECT_FALSE(is_formula_level(MrId::S1));
}

TEST(FindRedexes, Examples) {
  auto imp = find_redexes(F("P(a) -> Q(b)"), MrId::E1_1);
  ASSERT_EQ(imp.size(), 1u);
  EXPECT_TRUE(imp[0].path.empty());
  EXPECT_TRUE(find_redexes(F("P(a)"), MrId::E1_2).empty());
  EXPECT_EQ(paths(find_redexes(F("-(P(a) & --Q(b))"), MrId::E1_2)), (std::vector<Path>{{}, {0, 1}}));
  EXPECT_TRUE(find_redexes(F("P(a) -> Q(b)"), MrId::S1).empty());
}

TEST(FindRedexes, LeftmostOutermostOrder) {
  auto rs = find_redexes(F("(P(a) -> Q(a)) & ((R(a, a) -> P(b)) | (S(c) <-> T))"), MrId::E1_1);
  EXPECT_EQ(paths(rs), (std::vector<Path>{{0}, {1, 0}, {1, 1}}));
}

Formula apply_first(const char* text, MrId mr) {
  const Formula phi = F(text);
  auto rs = find_redexes(phi, mr);
  if (rs.empty()) throw NotApplicable("no redex");
  return apply(phi, rs.front());
}

TEST(Apply, EachRuleOnItsSchema) {
  EXPECT_EQ(apply_first("forall x. (ResidentOf(x, lawtonPark) -> UseZipCode(x, num98199))", MrId::E1_1),
            F("forall x. (-ResidentOf(x, lawtonPark) | UseZipCode(x, num98199))"));
  EXPECT_EQ(apply_first("P(a) <-> Q(b)", MrId::E1_1), F("(-P(a) | Q(b)) & (-Q(b) | P(a))"));
  EXPECT_EQ(apply_first("--P(a)", MrId::E1_2), F("P(a)"));
  EXPECT_EQ(apply_first("-(P(a) & Q(b))", MrId::E1_2), F("-P(a) | -Q(b)"));
  EXPECT_EQ(apply_first("-(forall x. P(x))", MrId::E1_2), F("exists x. -P(x)"));
  EXPECT_EQ(apply_first("(forall x. P(x)) & Q(a)", MrId::E1_3), F("forall x. (P(x) & Q(a))"));
  EXPECT_EQ(apply_first("(Q(a) & P(a)) & S(a)", MrId::E1_4), F("P(a) & Q(a) & S(a)"));
  EXPECT_EQ(apply_first("forall x. (P(x) & (exists x. Q(x)))", MrId::E1_5),
            F("forall x. (P(x) & (exists v1. Q(v1)))"));
  EXPECT_EQ(apply_first("forall y. forall x. R(x, y)", MrId::E1_6), F("forall x. forall y. R(x, y)"));
  EXPECT_EQ(apply_first("P(a) | P(a) | Q(a)", MrId::E2_1), F("P(a) | Q(a)"));
  EXPECT_EQ(apply_first("P(a) & (P(a) | Q(a))", MrId::E2_1), F("P(a)"));
  EXPECT_EQ(apply_first("P(a) | -P(a)", MrId::E2_2), truth());
  EXPECT_EQ(apply_first("P(a) & -P(a)", MrId::E2_2), falsity());
  EXPECT_EQ(apply_first("P(a) & 1", MrId::E2_3), F("P(a)"));
  EXPECT_EQ(apply_first("P(a) | 1", MrId::E2_3), truth());
  EXPECT_EQ(apply_first("P(a) & (Q(b) | R(c))", MrId::E2_4), F("(P(a) & Q(b)) | (P(a) & R(c))"));
}

TEST(Apply, Distribution) {
  const Formula before = F("P(a) & (Q(b) | R(c))");
  const Formula after = apply_first("P(a) & (Q(b) | R(c))", MrId::E2_4);
  EXPECT_TRUE(testing::equivalent_by_enumeration(before, after, 1));
}

TEST(Apply, SideConditionBlocksCapture) {
  // x is free in the sibling, so E1_3 may not lift; E1_5 renames first
  const Formula phi = F("forall x. (P(x) & (exists x. Q(x)))");
  EXPECT_TRUE(find_redexes(phi, MrId::E1_3).empty());
  EXPECT_FALSE(find_redexes(phi, MrId::E1_5).empty());
}

TEST(Apply, StaleRedexRejected) {
  const Formula phi = F("P(a) -> Q(b)");
  const Redex r = find_redexes(phi, MrId::E1_1).front();
  EXPECT_THROW(apply(F("P(a) -> Q(c)"), r), StaleRedex);
  EXPECT_THROW(apply(F("P(a)"), r), StaleRedex);
  Redex bad = r;
  bad.path = {3};
  EXPECT_THROW(apply(phi, bad), StaleRedex);
  Redex s1 = r;
  s1.mr = MrId::S1;
  EXPECT_THROW(apply(phi, s1), NotApplicable);
}

TEST(FormatStep, TabSeparated) {
  const Formula phi = F("-(P(a) & Q(b))");
  const Redex r = find_redexes(phi, MrId::E1_2).front();
  const Formula after = apply(phi, r);
  const std::string line = format_step({phi, after, r, measure(phi), measure(after)});
  EXPECT_EQ(line, "E1_2\t.\t-(P(a) & Q(b))\t(-P(a) | -Q(b))\t(0,9,0,0,0,0)\t(0,0,0,0,0,0)");
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_np(F("-(forall x. P(x))")).result, F("exists x. -P(x)"));
  const auto imp = normalize_np(F("P(a) -> Q(b)"));
  EXPECT_TRUE(measure(imp.result).is_zero());
  EXPECT_TRUE(testing::equivalent_by_enumeration(imp.result, F("-P(a) | Q(b)"), 1));
  const auto iff = normalize_np(F("P(a) <-> Q(b)"));
  EXPECT_TRUE(measure(iff.result).is_zero());
  EXPECT_TRUE(testing::equivalent_by_enumeration(iff.result, F("P(a) <-> Q(b)"), 1));
  EXPECT_EQ(normalize_np(F("-(P(a) & Q(b))")).trace.size(), 1u);
}

TEST(Normalize, CanonicalInputIsFixed) {
  const Formula phi = F("forall x. exists y. (-R(x, y) | P(x))");
  ASSERT_TRUE(measure(phi).is_zero());
  const auto n = normalize_np(phi);
  EXPECT_TRUE(n.trace.empty());
  EXPECT_EQ(n.result, phi);
}

TEST(Normalize, BudgetIsEnforced) {
  NormalizeOptions o;
  o.step_budget = 1;
  EXPECT_THROW(normalize_np(F("(P(a) -> Q(a)) -> R(a, a)"), o), InternalError);
}

TEST(Normalize, StrictDecreaseAndFixpoint) {
  Rng rng(101);
  for (int i = 0; i < 300; ++i) {
    const Formula phi = testing::random_formula(rng);
    const auto n = normalize_np(phi);
    for (const auto& s : n.trace) ASSERT_LT(s.measure_after, s.measure_before) << format_step(s);
    ASSERT_TRUE(measure(n.result).is_zero()) << print_formula(phi);
    ASSERT_TRUE(alpha_equal(normalize_np(n.result).result, n.result));
  }
}

TEST(Normalize, UniqueUpToAlphaAcrossStrategies) {
  Rng rng(202);
  for (int i = 0; i < 100; ++i) {
    const Formula phi = testing::random_formula(rng);
    const Formula base = normalize_np(phi).result;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      NormalizeOptions o;
      o.shuffle_seed = seed * 7919 + static_cast<std::uint64_t>(i);
      ASSERT_TRUE(alpha_equal(normalize_np(phi, o).result, base)) << print_formula(phi);
    }
  }
}

TEST(Normalize, PreservesMeaning) {
  Rng rng(303);
  testing::GenOptions g;
  g.monadic = true;
  g.predicates = 3;
  g.max_depth = 5;
  for (int i = 0; i < 80; ++i) {
    const Formula phi = testing::random_formula(rng, g);
    ASSERT_TRUE(testing::equivalent_by_enumeration(phi, normalize_np(phi).result, 2)) << print_formula(phi);
  }
}

TEST(Rules, EverySingleStepPreservesMeaning) {
  Rng rng(404);
  testing::GenOptions g;
  g.monadic = true;
  g.predicates = 3;
  g.max_depth = 5;
  std::set<MrId> seen;
  for (int i = 0; i < 400; ++i) {
    const Formula phi = testing::random_formula(rng, g);
    for (auto mr : kAllMrs) {
      if (!is_formula_level(mr)) continue;
      for (const auto& r : find_redexes(phi, mr)) {
        seen.insert(mr);
        const Formula after = apply(phi, r);
        ASSERT_TRUE(testing::equivalent_by_enumeration(phi, after, 2))
            << to_string(mr) << ": " << print_formula(phi) << " => " << print_formula(after);
      }
    }
  }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(RenameSymbol, Examples) {
  EXPECT_EQ(rename_symbol(F("ResidentOf(tom, lawtonPark)"), SymbolKind::Constant, "tom", "alex"),
            F("ResidentOf(alex, lawtonPark)"));
  EXPECT_EQ(rename_symbol(F("forall x. P(x)"), SymbolKind::Predicate, "P", "Pred7"), F("forall x. Pred7(x)"));
}

TEST(RenameSymbol, Errors) {
  const Formula phi = F("forall x. R(x, a) & P(b)");
  EXPECT_THROW(rename_symbol(phi, SymbolKind::Constant, "c", "d"), NotPresent);
  EXPECT_THROW(rename_symbol(phi, SymbolKind::Constant, "a", "b"), NotFresh);
  // would be captured by the binder
  EXPECT_THROW(rename_symbol(phi, SymbolKind::Constant, "a", "x"), NotFresh);
  EXPECT_THROW(rename_symbol(phi, SymbolKind::Predicate, "R", "P"), NotFresh);
  EXPECT_THROW(rename_symbol(phi, SymbolKind::Predicate, "Q", "S"), NotPresent);
}

}  // namespace
}  // namespace folmt
