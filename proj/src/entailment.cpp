#include "folmt/entailment.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "folmt/core.hpp"
#include "folmt/errors.hpp"

namespace folmt {

namespace {

// ---- evaluation ----------------------------------------------------------

std::size_t term_value(const Term& t, const Interpretation& m, const Environment& env) {
  if (t.is_variable()) {
    auto it = env.find(t.name);
    if (it == env.end()) throw UnboundVariable("variable " + t.name + " is not bound");
    return it->second;
  }
  auto it = m.constant_map.find(t.name);
  if (it == m.constant_map.end()) throw ConfigError("constant " + t.name + " is not interpreted");
  return it->second;
}

bool eval(const Formula& f, const Interpretation& m, Environment& env) {
  switch (f.kind()) {
    case FormulaKind::Bool:
      return f.value();
    case FormulaKind::Atom: {
      std::vector<std::size_t> tuple;
      tuple.reserve(f.args().size());
      for (const auto& t : f.args()) tuple.push_back(term_value(t, m, env));
      auto it = m.predicate_tables.find(f.symbol());
      return it != m.predicate_tables.end() && it->second.contains(tuple);
    }
    case FormulaKind::Not:
      return !eval(f.child(0), m, env);
    case FormulaKind::And:
      for (const auto& c : f.children())
        if (!eval(c, m, env)) return false;
      return true;
    case FormulaKind::Or:
      for (const auto& c : f.children())
        if (eval(c, m, env)) return true;
      return false;
    case FormulaKind::Implies:
      return !eval(f.child(0), m, env) || eval(f.child(1), m, env);
    case FormulaKind::Iff:
      return eval(f.child(0), m, env) == eval(f.child(1), m, env);
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      const bool universal = f.kind() == FormulaKind::Forall;
      const auto& x = f.symbol();
      std::optional<std::size_t> saved;
      if (auto it = env.find(x); it != env.end()) saved = it->second;
      bool result = universal;
      for (std::size_t e = 0; e < m.domain_size; ++e) {
        env[x] = e;
        if (eval(f.child(0), m, env) != universal) {
          result = !universal;
          break;
        }
      }
      if (saved)
        env[x] = *saved;
      else
        env.erase(x);
      return result;
    }
  }
  return false;
}

// ---- SAT -----------------------------------------------------------------

// DPLL with two watched literals and chronological backtracking. Literals
// are non-zero ints, negative for negation.
class Solver {
 public:
  int new_var() {
    ++nvars_;
    assign_.push_back(-1);
    watches_.resize(2 * (nvars_ + 1));
    return nvars_;
  }

  void add_clause(std::vector<int> lits) {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (auto l : lits)
      if (std::find(lits.begin(), lits.end(), -l) != lits.end()) return;
    if (lits.empty()) {
      trivially_unsat_ = true;
      return;
    }
    if (lits.size() == 1) {
      units_.push_back(lits[0]);
      return;
    }
    const auto idx = clauses_.size();
    clauses_.push_back(std::move(lits));
    watches_[index(clauses_[idx][0])].push_back(idx);
    watches_[index(clauses_[idx][1])].push_back(idx);
  }

  // Returns the model indexed by variable, or nothing when unsatisfiable.
  std::optional<std::vector<bool>> solve(const std::vector<int>& assumptions, std::uint64_t budget) {
    std::fill(assign_.begin(), assign_.end(), -1);
    trail_.clear();
    levels_.clear();
    qhead_ = 0;
    if (trivially_unsat_) return std::nullopt;
    for (auto l : units_)
      if (!enqueue(l)) return std::nullopt;
    for (auto l : assumptions)
      if (!enqueue(l)) return std::nullopt;
    if (!propagate()) return std::nullopt;

    std::uint64_t decisions = 0;
    int next = 1;
    for (;;) {
      while (next <= nvars_ && assign_[next] != -1) ++next;
      if (next > nvars_) {
        std::vector<bool> model(nvars_ + 1, false);
        for (int v = 1; v <= nvars_; ++v) model[v] = assign_[v] == 1;
        return model;
      }
      if (++decisions > budget) throw BudgetExceeded("SAT decision budget exhausted");
      levels_.push_back({trail_.size(), -next, false});
      enqueue(-next);
      while (!propagate()) {
        // flip the most recent unflipped decision
        while (!levels_.empty() && levels_.back().flipped) {
          undo_to(levels_.back().trail_size);
          levels_.pop_back();
        }
        if (levels_.empty()) return std::nullopt;
        auto& lv = levels_.back();
        undo_to(lv.trail_size);
        lv.flipped = true;
        lv.decision = -lv.decision;
        enqueue(lv.decision);
        next = 1;
      }
    }
  }

 private:
  struct Level {
    std::size_t trail_size;
    int decision;
    bool flipped;
  };

  static std::size_t index(int lit) { return 2 * static_cast<std::size_t>(std::abs(lit)) + (lit < 0 ? 1 : 0); }

  int value(int lit) const {
    int a = assign_[std::abs(lit)];
    if (a < 0) return -1;
    return (a == 1) == (lit > 0) ? 1 : 0;
  }

  bool enqueue(int lit) {
    int v = value(lit);
    if (v == 0) return false;
    if (v == 1) return true;
    assign_[std::abs(lit)] = lit > 0 ? 1 : 0;
    trail_.push_back(lit);
    return true;
  }

  void undo_to(std::size_t size) {
    while (trail_.size() > size) {
      assign_[std::abs(trail_.back())] = -1;
      trail_.pop_back();
    }
    qhead_ = std::min(qhead_, size);
  }

  bool propagate() {
    while (qhead_ < trail_.size()) {
      const int falsified = -trail_[qhead_++];
      auto& ws = watches_[index(falsified)];
      std::size_t keep = 0;
      bool ok = true;
      for (std::size_t w = 0; w < ws.size(); ++w) {
        const auto ci = ws[w];
        auto& c = clauses_[ci];
        if (!ok) {
          ws[keep++] = ci;
          continue;
        }
        if (c[0] == falsified) std::swap(c[0], c[1]);
        if (value(c[0]) == 1) {
          ws[keep++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (value(c[k]) != 0) {
            std::swap(c[1], c[k]);
            watches_[index(c[1])].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[keep++] = ci;
        if (!enqueue(c[0])) ok = false;
      }
      ws.resize(keep);
      if (!ok) return false;
    }
    return true;
  }

  int nvars_ = 0;
  bool trivially_unsat_ = false;
  std::vector<int> assign_{-1};
  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<std::size_t>> watches_{2};
  std::vector<int> units_;
  std::vector<int> trail_;
  std::vector<Level> levels_;
  std::size_t qhead_ = 0;
};

// ---- grounding -----------------------------------------------------------

struct Signature {
  std::vector<std::string> constants;
  std::map<std::string, std::size_t> predicates;
};

Signature signature_of(const std::vector<Formula>& fs) {
  NameSet consts;
  Signature sig;
  for (const auto& f : fs) {
    auto c = constants(f);
    consts.insert(c.begin(), c.end());
    for (const auto& [p, a] : predicates(f)) sig.predicates.emplace(p, a);
  }
  sig.constants.assign(consts.begin(), consts.end());
  return sig;
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

std::size_t saturating_add(std::size_t a, std::size_t b) {
  return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max() : a + b;
}

// Grounded node count of `f` at domain size n, with atoms weighted by the
// number of constant assignments they expand to.
std::size_t ground_cost(const Formula& f, std::size_t n) {
  switch (f.kind()) {
    case FormulaKind::Atom: {
      std::size_t c = 1;
      for (const auto& t : f.args())
        if (!t.is_variable()) c = saturating_mul(c, n);
      return c;
    }
    case FormulaKind::Bool:
      return 1;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return saturating_add(1, saturating_mul(n, ground_cost(f.child(0), n)));
    default: {
      std::size_t c = 1;
      for (const auto& k : f.children()) c = saturating_add(c, ground_cost(k, n));
      return c;
    }
  }
}

class Encoder {
 public:
  Encoder(Solver& s, const Signature& sig, std::size_t n) : s_(s), sig_(sig), n_(n) {
    true_ = s_.new_var();
    s_.add_clause({true_});
    // Elements are interchangeable, so the i-th constant may be restricted to
    // the first i+1 elements without losing any model up to isomorphism.
    for (std::size_t i = 0; i < sig.constants.size(); ++i) {
      std::vector<int> vars;
      const std::size_t reach = std::min(n, i + 1);
      for (std::size_t e = 0; e < reach; ++e) vars.push_back(s_.new_var());
      s_.add_clause(vars);
      for (std::size_t a = 0; a < vars.size(); ++a)
        for (std::size_t b = a + 1; b < vars.size(); ++b) s_.add_clause({-vars[a], -vars[b]});
      const_vars_.emplace(sig.constants[i], std::move(vars));
    }
  }

  int encode(const Formula& f) {
    std::vector<std::pair<std::string, std::size_t>> env;
    return encode(f, env);
  }

  Interpretation decode(const std::vector<bool>& model) const {
    Interpretation m;
    m.domain_size = n_;
    for (const auto& [c, vars] : const_vars_) {
      m.constant_map[c] = 0;
      for (std::size_t e = 0; e < vars.size(); ++e)
        if (model[vars[e]]) m.constant_map[c] = e;
    }
    for (const auto& [p, a] : sig_.predicates) {
      (void)a;
      m.predicate_tables[p];
    }
    for (const auto& [key, var] : atom_vars_)
      if (model[var]) m.predicate_tables[key.first].insert(key.second);
    return m;
  }

 private:
  int gate(bool conj, std::vector<int> lits) {
    std::vector<int> kept;
    for (auto l : lits) {
      if (l == (conj ? true_ : -true_)) continue;
      if (l == (conj ? -true_ : true_)) return conj ? -true_ : true_;
      kept.push_back(l);
    }
    if (kept.empty()) return conj ? true_ : -true_;
    if (kept.size() == 1) return kept[0];
    const int g = s_.new_var();
    std::vector<int> big{conj ? g : -g};
    for (auto l : kept) {
      if (conj) {
        s_.add_clause({-g, l});
        big.push_back(-l);
      } else {
        s_.add_clause({g, -l});
        big.push_back(l);
      }
    }
    s_.add_clause(std::move(big));
    return g;
  }

  int atom_var(const std::string& p, const std::vector<std::size_t>& tuple) {
    auto [it, inserted] = atom_vars_.try_emplace({p, tuple}, 0);
    if (inserted) it->second = s_.new_var();
    return it->second;
  }

  std::size_t lookup(const std::vector<std::pair<std::string, std::size_t>>& env, const std::string& x) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == x) return it->second;
    throw UnboundVariable("variable " + x + " is not bound");
  }

  int encode_atom(const Formula& f, const std::vector<std::pair<std::string, std::size_t>>& env) {
    const auto args = f.args();
    std::vector<std::size_t> tuple(args.size(), 0);
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i].is_variable())
        tuple[i] = lookup(env, args[i].name);
      else
        slots.push_back(i);
    }
    if (slots.empty()) return atom_var(f.symbol(), tuple);
    // Disjunction over the possible denotations of the constant arguments.
    std::vector<int> cases;
    std::vector<std::size_t> choice(slots.size(), 0);
    for (;;) {
      std::vector<int> conj;
      bool possible = true;
      for (std::size_t k = 0; k < slots.size(); ++k) {
        const auto& vars = const_vars_.at(args[slots[k]].name);
        if (choice[k] >= vars.size()) {
          possible = false;
          break;
        }
        conj.push_back(vars[choice[k]]);
        tuple[slots[k]] = choice[k];
      }
      if (possible) {
        conj.push_back(atom_var(f.symbol(), tuple));
        cases.push_back(gate(true, std::move(conj)));
      }
      std::size_t k = 0;
      while (k < slots.size() && ++choice[k] == n_) choice[k++] = 0;
      if (k == slots.size()) break;
    }
    return gate(false, std::move(cases));
  }

  int encode(const Formula& f, std::vector<std::pair<std::string, std::size_t>>& env) {
    switch (f.kind()) {
      case FormulaKind::Bool:
        return f.value() ? true_ : -true_;
      case FormulaKind::Atom:
        return encode_atom(f, env);
      case FormulaKind::Not:
        return -encode(f.child(0), env);
      case FormulaKind::And:
      case FormulaKind::Or: {
        std::vector<int> lits;
        for (const auto& c : f.children()) lits.push_back(encode(c, env));
        return gate(f.kind() == FormulaKind::And, std::move(lits));
      }
      case FormulaKind::Implies:
        return gate(false, {-encode(f.child(0), env), encode(f.child(1), env)});
      case FormulaKind::Iff: {
        const int a = encode(f.child(0), env);
        const int b = encode(f.child(1), env);
        const int g = s_.new_var();
        s_.add_clause({-g, -a, b});
        s_.add_clause({-g, a, -b});
        s_.add_clause({g, a, b});
        s_.add_clause({g, -a, -b});
        return g;
      }
      case FormulaKind::Forall:
      case FormulaKind::Exists: {
        std::vector<int> lits;
        for (std::size_t e = 0; e < n_; ++e) {
          env.emplace_back(f.symbol(), e);
          lits.push_back(encode(f.child(0), env));
          env.pop_back();
        }
        return gate(f.kind() == FormulaKind::Forall, std::move(lits));
      }
    }
    return true_;
  }

  Solver& s_;
  const Signature& sig_;
  std::size_t n_;
  int true_ = 0;
  std::map<std::string, std::vector<int>> const_vars_;
  std::map<std::pair<std::string, std::vector<std::size_t>>, int> atom_vars_;
};

void require_closed(const std::vector<Formula>& fs) {
  for (const auto& f : fs) {
    auto fv = free_vars(f);
    if (!fv.empty()) throw UnboundVariable("formula has free variable " + *fv.begin());
  }
}

void check_budget(const std::vector<Formula>& fs, std::size_t n, const EntailmentOptions& opt) {
  std::size_t total = 0;
  for (const auto& f : fs) total = saturating_add(total, ground_cost(f, n));
  if (total > opt.ground_budget)
    throw BudgetExceeded("grounding at domain size " + std::to_string(n) + " needs about " + std::to_string(total) +
                         " nodes, over the budget of " + std::to_string(opt.ground_budget));
}

bool is_ground(const Formula& f) {
  if (f.is_quantifier()) return false;
  for (const auto& c : f.children())
    if (!is_ground(c)) return false;
  return true;
}

Completeness completeness_for(const std::vector<Formula>& fs, std::size_t max_domain) {
  auto b = exact_bound(fs);
  return b && max_domain >= *b ? Completeness::Exact : Completeness::Bounded;
}

}  // namespace

bool holds(const Formula& phi, const Interpretation& interp, const Environment& env) {
  Environment scratch = env;
  return eval(phi, interp, scratch);
}

const char* to_string(Completeness c) noexcept { return c == Completeness::Exact ? "exact" : "bounded"; }

std::optional<std::size_t> exact_bound(const std::vector<Formula>& formulas) {
  bool ground = true;
  bool monadic = true;
  NameSet consts;
  std::set<std::string> unary;
  for (const auto& f : formulas) {
    ground = ground && is_ground(f);
    auto c = constants(f);
    consts.insert(c.begin(), c.end());
    for (const auto& [p, a] : predicates(f)) {
      if (a > 1) monadic = false;
      if (a == 1) unary.insert(p);
    }
  }
  std::optional<std::size_t> bound;
  if (ground) bound = std::max<std::size_t>(1, consts.size());
  if (monadic) {
    std::size_t m = unary.size() >= 63 ? std::numeric_limits<std::size_t>::max() : std::size_t{1} << unary.size();
    bound = bound ? std::min(*bound, m) : m;
  }
  return bound;
}

std::size_t auto_domain_bound(const std::vector<Formula>& formulas, std::size_t cap, std::size_t fallback) {
  auto b = exact_bound(formulas);
  if (b && *b <= cap) return *b;
  return fallback;
}

Verdict entails(const std::vector<Formula>& gamma, const Formula& q, const EntailmentOptions& options) {
  if (options.max_domain < 1) throw ConfigError("max_domain must be at least 1");
  std::vector<Formula> all = gamma;
  all.push_back(q);
  require_closed(all);
  const Signature sig = signature_of(all);
  for (std::size_t n = 1; n <= options.max_domain; ++n) check_budget(all, n, options);

  Verdict v;
  v.max_domain = options.max_domain;
  v.completeness = completeness_for(all, options.max_domain);
  bool any_model = false;
  // Without equality, a model can always be enlarged by cloning an element,
  // so whatever is found at a small size persists at every larger size.
  for (std::size_t n = 1; n <= options.max_domain && !(v.countermodel && v.witness); ++n) {
    Solver s;
    Encoder enc(s, sig, n);
    std::vector<int> premises;
    for (const auto& g : gamma) premises.push_back(enc.encode(g));
    const int goal = enc.encode(q);
    if (!v.countermodel) {
      auto assume = premises;
      assume.push_back(-goal);
      if (auto m = s.solve(assume, options.decision_budget)) v.countermodel = enc.decode(*m);
    }
    if (!v.witness) {
      auto assume = premises;
      assume.push_back(goal);
      if (auto m = s.solve(assume, options.decision_budget)) v.witness = enc.decode(*m);
    }
    any_model = any_model || v.countermodel || v.witness;
  }
  v.premises_consistent = any_model;
  if (!any_model)
    v.label = Label::Unknown;
  else if (!v.countermodel)
    v.label = Label::True;
  else if (!v.witness)
    v.label = Label::False;
  else
    v.label = Label::Unknown;
  // Two concrete models settle Unknown in any fragment.
  if (v.countermodel && v.witness) v.completeness = Completeness::Exact;
  return v;
}

Consistency consistent(const std::vector<Formula>& gamma, const EntailmentOptions& options) {
  if (options.max_domain < 1) throw ConfigError("max_domain must be at least 1");
  require_closed(gamma);
  Consistency out;
  out.completeness = gamma.empty() ? Completeness::Exact : completeness_for(gamma, options.max_domain);
  const Signature sig = signature_of(gamma);
  for (std::size_t n = 1; n <= options.max_domain; ++n) check_budget(gamma, n, options);
  for (std::size_t n = 1; n <= options.max_domain; ++n) {
    Solver s;
    Encoder enc(s, sig, n);
    std::vector<int> premises;
    for (const auto& g : gamma) premises.push_back(enc.encode(g));
    if (auto m = s.solve(premises, options.decision_budget)) {
      out.consistent = true;
      // A model is a certificate whatever the fragment.
      out.completeness = Completeness::Exact;
      out.model = enc.decode(*m);
      break;
    }
  }
  return out;
}

}  // namespace folmt
