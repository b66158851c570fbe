#ifndef FOLMT_ENTAILMENT_HPP
#define FOLMT_ENTAILMENT_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "folmt/formula.hpp"
#include "folmt/syntax.hpp"

namespace folmt {

// A finite structure. Domain elements are 0 .. domain_size-1; a predicate
// holds of exactly the tuples listed in its table.
struct Interpretation {
  std::size_t domain_size = 1;
  std::map<std::string, std::size_t> constant_map;
  std::map<std::string, std::set<std::vector<std::size_t>>> predicate_tables;
};

using Environment = std::map<std::string, std::size_t>;

// Tarskian satisfaction. Throws UnboundVariable for a free variable missing
// from `env` and ConfigError for an uninterpreted constant.
bool holds(const Formula& phi, const Interpretation& interp, const Environment& env = {});

enum class Completeness { Exact, Bounded };
const char* to_string(Completeness c) noexcept;

struct EntailmentOptions {
  std::size_t max_domain = 3;
  // Upper bound on grounded formula nodes per domain size.
  std::size_t ground_budget = 4'000'000;
  // Upper bound on SAT decisions per query.
  std::uint64_t decision_budget = 50'000'000;
};

struct Verdict {
  Label label = Label::Unknown;
  Completeness completeness = Completeness::Bounded;
  // False when no checked interpretation satisfies the premises; the label
  // is then Unknown.
  bool premises_consistent = true;
  std::size_t max_domain = 0;
  // A model of the premises where the conclusion fails, if one was found.
  std::optional<Interpretation> countermodel;
  // A model of the premises where the conclusion holds, if one was found.
  std::optional<Interpretation> witness;
};

// Three-valued bounded entailment over domains of size 1..max_domain.
// Throws BudgetExceeded rather than truncating, and UnboundVariable when a
// formula has free variables.
Verdict entails(const std::vector<Formula>& gamma, const Formula& q, const EntailmentOptions& options = {});

struct Consistency {
  bool consistent = false;
  Completeness completeness = Completeness::Bounded;
  std::optional<Interpretation> model;
};

Consistency consistent(const std::vector<Formula>& gamma, const EntailmentOptions& options = {});

// Smallest domain bound at which the bounded check is complete for these
// formulas: the number of constants for quantifier-free input, 2^k for input
// whose predicates are all at most unary (k unary predicates), nothing
// otherwise.
std::optional<std::size_t> exact_bound(const std::vector<Formula>& formulas);

// exact_bound when it is at most `cap`, else `fallback`.
std::size_t auto_domain_bound(const std::vector<Formula>& formulas, std::size_t cap = 16, std::size_t fallback = 3);

}  // namespace folmt

#endif  // FOLMT_ENTAILMENT_HPP
