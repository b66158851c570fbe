#include <gtest/gtest.h>

#include "folmt/core.hpp"
#include "folmt/syntax.hpp"
#include "formula_gen.hpp"

namespace folmt {
namespace {

Formula F(const char* s) { return parse_formula(s); }
Term V(const char* n) { return Term::variable(n); }
Term C(const char* n) { return Term::constant(n); }

TEST(FreeVars, Examples) {
  EXPECT_TRUE(free_vars(forall("x", atom("P", {V("x")}))).empty());
  EXPECT_EQ(free_vars(atom("P", {V("x")})), NameSet{"x"});
  EXPECT_EQ(free_vars(forall("x", atom("R", {V("x"), V("y")}))), NameSet{"y"});
}

TEST(AllVars, Examples) {
  EXPECT_EQ(all_vars(forall("x", atom("P", {V("x")}))), NameSet{"x"});
  EXPECT_TRUE(all_vars(atom("P", {C("c")})).empty());
  EXPECT_EQ(all_vars(conjunction({forall("x", atom("P", {V("x")})), atom("Q", {V("y")})})), (NameSet{"x", "y"}));
}

TEST(Symbols, ConstantsAndPredicates) {
  const Formula phi = F("forall x. (R(x, a) -> P(b)) & T");
  EXPECT_EQ(constants(phi), (NameSet{"a", "b"}));
  const auto preds = predicates(phi);
  EXPECT_EQ(preds.at("R"), 2u);
  EXPECT_EQ(preds.at("P"), 1u);
  EXPECT_EQ(preds.at("T"), 0u);
}

TEST(FreshName, SkipsTaken) {
  EXPECT_EQ(fresh_name("v", {}), "v1");
  EXPECT_EQ(fresh_name("v", {"v1", "v2"}), "v3");
}

TEST(Substitute, Examples) {
  EXPECT_EQ(substitute(atom("P", {V("x")}), "x", C("c")), atom("P", {C("c")}));
  const Formula bound = forall("x", atom("P", {V("x")}));
  EXPECT_EQ(substitute(bound, "x", C("c")), bound);
}

TEST(Substitute, AvoidsCapture) {
  const Formula phi = forall("y", atom("R", {V("x"), V("y")}));
  const Formula out = substitute(phi, "x", V("y"));
  ASSERT_EQ(out.kind(), FormulaKind::Forall);
  EXPECT_NE(out.symbol(), "y");
  EXPECT_EQ(free_vars(out), NameSet{"y"});
  EXPECT_TRUE(alpha_equal(out, forall("y1", atom("R", {V("y"), V("y1")}))));
}

TEST(Substitute, IdentityAndFreeVarLaw) {
  Rng rng(7);
  testing::GenOptions o;
  o.max_depth = 6;
  for (int i = 0; i < 300; ++i) {
    // open formula: strip the first binder when there is one
    Formula phi = testing::random_formula(rng, o);
    if (phi.is_quantifier()) phi = phi.child(0);
    for (const auto& x : free_vars(phi)) {
      EXPECT_TRUE(alpha_equal(substitute(phi, x, V(x.c_str())), phi));
      NameSet expect = free_vars(phi);
      expect.erase(x);
      EXPECT_EQ(free_vars(substitute(phi, x, C("c9"))), expect);
    }
  }
}

TEST(AlphaEqual, Examples) {
  EXPECT_TRUE(alpha_equal(F("forall x. P(x)"), F("forall y. P(y)")));
  EXPECT_FALSE(alpha_equal(F("forall x. P(x)"), F("exists x. P(x)")));
  EXPECT_TRUE(alpha_equal(F("forall x. forall y. R(x, y)"), F("forall y. forall x. R(y, x)")));
  EXPECT_FALSE(alpha_equal(F("forall x. forall y. R(x, y)"), F("forall x. forall y. R(y, x)")));
  // a free variable is not renamable
  EXPECT_FALSE(alpha_equal(atom("P", {V("x")}), atom("P", {V("y")})));
}

TEST(AlphaEqual, EquivalenceRelationOnSamples) {
  Rng rng(11);
  testing::GenOptions o;
  o.max_depth = 5;
  std::vector<Formula> sample;
  for (int i = 0; i < 60; ++i) sample.push_back(testing::random_formula(rng, o));
  for (const auto& a : sample) {
    EXPECT_TRUE(alpha_equal(a, a));
    for (const auto& b : sample) {
      EXPECT_EQ(alpha_equal(a, b), alpha_equal(b, a));
      if (!alpha_equal(a, b)) continue;
      for (const auto& c : sample)
        if (alpha_equal(b, c)) {
          EXPECT_TRUE(alpha_equal(a, c));
        }
    }
  }
}

TEST(CanonicalOrder, InvariantUnderRenamingAndTotal) {
  EXPECT_EQ(canonical_text(F("forall x. P(x)")), canonical_text(F("forall z. P(z)")));
  const Formula a = F("P(a)");
  const Formula b = F("Q(a)");
  EXPECT_NE(canonical_less(a, b), canonical_less(b, a));
  EXPECT_FALSE(canonical_less(a, a));
}

TEST(Measure, Examples) {
  EXPECT_TRUE(measure(F("P(a)")).is_zero());
  const Measure imp = measure(F("P(a) -> Q(b)"));
  EXPECT_EQ(imp.implications, 1u);
  EXPECT_EQ(imp.negation_weight, 0);
  EXPECT_EQ(imp.structure, 0);
  const Measure neg = measure(F("-(P(a) & Q(b))"));
  EXPECT_EQ(neg.implications, 0u);
  EXPECT_GT(neg.negation_weight, 0);
  EXPECT_EQ(to_string(neg), "(0,9,0,0,0,0)");
}

TEST(Measure, ComponentsDetectEachDefect) {
  EXPECT_GT(measure(F("P(a) & (exists x. Q(x))")).quantifier_depth, 0u);
  EXPECT_GT(measure(F("(Q(a) & P(a))")).structure, 0);
  EXPECT_GT(measure(F("(P(a) & (Q(a) & S(a)))")).structure, 0);
  EXPECT_EQ(measure(F("(exists x. Q(x)) & P(x0)")).conflicts, 0u);
  EXPECT_GT(measure(F("forall x. ((exists x. Q(x)) & P(x))")).conflicts, 0u);
  EXPECT_GT(measure(F("forall y. forall x. R(x, y)")).block_disorder, 0u);
  EXPECT_TRUE(measure(F("forall x. forall y. R(x, y)")).is_zero());
}

TEST(Measure, AlphaInvariantWithoutConflicts) {
  const Formula a = F("forall x. exists y. (P(x) | -R(x, y))");
  const Formula b = F("forall u. exists v. (P(u) | -R(u, v))");
  EXPECT_EQ(measure(a), measure(b));
}

TEST(Measure, DeepFormulasDoNotOverflow) {
  // 70 nested negations of a junction
  Formula phi = F("P(a) & Q(a)");
  for (int i = 0; i < 70; ++i) phi = negation(conjunction({phi, atom("S", {C("a")})}));
  const Measure m = measure(phi);
  EXPECT_GT(m.negation_weight, Weight(1) << 64);
}

}  // namespace
}  // namespace folmt
