#include "formula_gen.hpp"

#include <array>
#include <map>
#include <string>

#include "folmt/core.hpp"

namespace folmt::testing {

namespace {

struct PredSpec {
  const char* name;
  std::size_t arity;
};

constexpr std::array<PredSpec, 6> kPreds = {{{"P", 1}, {"Q", 1}, {"R", 2}, {"S", 1}, {"T", 0}, {"U", 2}}};
constexpr std::array<const char*, 3> kConsts = {"a", "b", "c"};
constexpr std::array<const char*, 4> kVars = {"x", "y", "z", "w"};

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

class Gen {
 public:
  Gen(Rng& rng, const GenOptions& o) : rng_(rng), o_(o) {}

  Formula make(std::size_t depth) {
    if (depth <= 1) return leaf();
    enum Choice { Leaf, Not, And, Or, Implies, Iff, Forall, Exists };
    const double q = o_.ground ? 0.0 : 1.5;
    const double weights[] = {1.5, 2, 2, 2, 1, o_.iff_weight, q, q};
    double total = 0;
    for (double w : weights) total += w;
    double r = uniform01(rng_) * total;
    int pick = 0;
    while (pick < 7 && r >= weights[pick]) r -= weights[pick++];
    switch (static_cast<Choice>(pick)) {
      case Leaf: return leaf();
      case Not: return negation(make(depth - 1));
      case And:
      case Or: {
        std::vector<Formula> ops;
        const std::size_t n = 2 + uniform_index(rng_, 2);
        for (std::size_t i = 0; i < n; ++i) ops.push_back(make(depth - 1));
        return pick == And ? conjunction(std::move(ops)) : disjunction(std::move(ops));
      }
      case Implies: return implication(make(depth - 1), make(depth - 1));
      case Iff: return biconditional(make(depth - 1), make(depth - 1));
      case Forall:
      case Exists: {
        std::string v = kVars[uniform_index(rng_, kVars.size())];
        bound_.push_back(v);
        Formula body = make(depth - 1);
        bound_.pop_back();
        return quantified(pick == Forall ? FormulaKind::Forall : FormulaKind::Exists, v, body);
      }
    }
    return leaf();
  }

 private:
  Formula leaf() {
    if (o_.allow_bool && uniform_index(rng_, 12) == 0) return boolean(uniform_index(rng_, 2) == 0);
    const auto& p = kPreds[uniform_index(rng_, std::max<std::size_t>(1, std::min(o_.predicates, kPreds.size())))];
    const std::size_t arity = o_.monadic ? std::min<std::size_t>(p.arity, 1) : p.arity;
    std::vector<Term> args;
    for (std::size_t i = 0; i < arity; ++i) {
      // prefer bound variables so quantifiers are rarely vacuous
      if (!bound_.empty() && uniform_index(rng_, 4) != 0)
        args.push_back(Term::variable(bound_[uniform_index(rng_, bound_.size())]));
      else
        args.push_back(Term::constant(kConsts[uniform_index(rng_, kConsts.size())]));
    }
    return atom(p.name, std::move(args));
  }

  Rng& rng_;
  const GenOptions& o_;
  std::vector<std::string> bound_;
};

}  // namespace

Formula random_formula(Rng& rng, const GenOptions& options) {
  Gen g(rng, options);
  return g.make(1 + uniform_index(rng, options.max_depth));
}

void for_each_interpretation(const std::vector<Formula>& formulas, std::size_t n,
                             const std::function<bool(const Interpretation&)>& f) {
  std::vector<std::string> consts;
  std::vector<std::pair<std::string, std::size_t>> preds;
  {
    NameSet cs;
    std::map<std::string, std::size_t> ps;
    for (const auto& phi : formulas) {
      for (const auto& c : constants(phi)) cs.insert(c);
      for (const auto& [p, a] : predicates(phi)) ps[p] = a;
    }
    consts.assign(cs.begin(), cs.end());
    preds.assign(ps.begin(), ps.end());
  }
  // one digit per constant (base n), then one bit per predicate tuple
  std::vector<std::vector<std::vector<std::size_t>>> tuples;
  for (const auto& [p, a] : preds) {
    std::vector<std::vector<std::size_t>> ts;
    std::size_t count = 1;
    for (std::size_t i = 0; i < a; ++i) count *= n;
    for (std::size_t k = 0; k < count; ++k) {
      std::vector<std::size_t> t(a);
      std::size_t v = k;
      for (std::size_t i = 0; i < a; ++i) {
        t[i] = v % n;
        v /= n;
      }
      ts.push_back(std::move(t));
    }
    tuples.push_back(std::move(ts));
  }
  std::vector<std::size_t> cdig(consts.size(), 0);
  while (true) {
    std::vector<std::vector<bool>> bits;
    for (const auto& ts : tuples) bits.emplace_back(ts.size(), false);
    while (true) {
      Interpretation I;
      I.domain_size = n;
      for (std::size_t i = 0; i < consts.size(); ++i) I.constant_map[consts[i]] = cdig[i];
      for (std::size_t p = 0; p < preds.size(); ++p) {
        auto& table = I.predicate_tables[preds[p].first];
        for (std::size_t k = 0; k < tuples[p].size(); ++k)
          if (bits[p][k]) table.insert(tuples[p][k]);
      }
      if (!f(I)) return;
      // binary counter over all predicate bits
      bool carry = true;
      for (std::size_t p = 0; p < bits.size() && carry; ++p)
        for (std::size_t k = 0; k < bits[p].size() && carry; ++k) {
          bits[p][k] = !bits[p][k];
          carry = !bits[p][k];
        }
      if (carry) break;
    }
    std::size_t i = 0;
    while (i < cdig.size() && ++cdig[i] == n) cdig[i++] = 0;
    if (i == cdig.size()) return;
  }
}

bool equivalent_by_enumeration(const Formula& a, const Formula& b, std::size_t max_domain) {
  bool same = true;
  for (std::size_t n = 1; n <= max_domain && same; ++n)
    for_each_interpretation({a, b}, n, [&](const Interpretation& I) {
      same = holds(a, I) == holds(b, I);
      return same;
    });
  return same;
}

}  // namespace folmt::testing
