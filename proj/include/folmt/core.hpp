#ifndef FOLMT_CORE_HPP
#define FOLMT_CORE_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "folmt/formula.hpp"

namespace folmt {

using NameSet = std::set<std::string>;

NameSet free_vars(const Formula& phi);
// Free and bound variable names, including binders with no occurrence.
NameSet all_vars(const Formula& phi);
NameSet constants(const Formula& phi);
// Predicate name to arity, in first-seen order of the map's key ordering.
std::map<std::string, std::size_t> predicates(const Formula& phi);

// `prefix1`, `prefix2`, ... : the first one not in `avoid`.
std::string fresh_name(const std::string& prefix, const NameSet& avoid);

// Capture-avoiding replacement of the free occurrences of `x` by `t`.
Formula substitute(const Formula& phi, const std::string& x, const Term& t);

bool alpha_equal(const Formula& phi, const Formula& psi);

// Serialization with bound variables replaced by their binder's nesting level,
// so alpha-variants serialize identically. Free variables are marked `?name`.
std::string canonical_text(const Formula& phi);

// The canonical order: byte order on canonical_text.
bool canonical_less(const Formula& a, const Formula& b);

// Sort keys for `operands`, all of which sit directly below the node at `path`
// in `root`. Variables bound by the root's quantifier prefix are identified by
// their prefix block only, which keeps keys stable under alpha-renaming and
// under reordering inside a block.
std::vector<std::string> contextual_keys(const Formula& root, std::span<const std::size_t> path,
                                         std::span<const Formula> operands);

// One maximal run of identical quantifiers in the root prefix.
struct PrefixBlock {
  FormulaKind quantifier;
  std::size_t start;  // depth of the first binder of the block
  std::vector<std::string> variables;
};

// Root quantifier prefix split into maximal same-quantifier blocks, plus the
// matrix path depth (the number of leading quantifiers).
std::vector<PrefixBlock> prefix_blocks(const Formula& phi);
std::size_t prefix_length(const Formula& phi);

// For each binder in the root prefix (by prefix position), the index of its
// first occurrence in a left-to-right walk of the matrix, or SIZE_MAX when it
// binds nothing (vacuous or shadowed).
std::vector<std::size_t> prefix_first_occurrences(const Formula& phi);

// Termination measure, compared lexicographically in field order.
//
// All fields are zero exactly when the formula is a canonical prenex
// negation normal form. Several counts are weighted so that every oriented
// canonicalizing rewrite strictly decreases its component:
//   implications      number of -> and <-> nodes
//   negation_weight   sum over negations of non-atomic bodies of B^height(body),
//                     B = 1 + max(2, widest And/Or)
//   quantifier_depth  sum over quantifiers outside the root prefix of the
//                     number of connectives above them
//   structure         sum over And/Or nodes that have a same-connective child or
//                     unsorted operands of 2^depth(node)
//   conflicts         quantifiers directly under And/Or whose variable is free
//                     in a sibling operand
//   block_disorder    adjacent pairs in a root prefix block whose variables
//                     disagree with first-occurrence order in the matrix
// The two exponentially weighted fields are unbounded integers.
using Weight = boost::multiprecision::cpp_int;

struct Measure {
  std::uint64_t implications = 0;
  Weight negation_weight = 0;
  std::uint64_t quantifier_depth = 0;
  Weight structure = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t block_disorder = 0;

  bool is_zero() const { return *this == Measure{}; }

  friend bool operator==(const Measure&, const Measure&) = default;
  friend std::strong_ordering operator<=>(const Measure&, const Measure&) = default;
};

Measure measure(const Formula& phi);

std::ostream& operator<<(std::ostream& os, const Measure& m);
std::string to_string(const Measure& m);

// True when the And/Or node at `path` has no same-connective operand and its
// operands are sorted by contextual key.
bool junction_is_canonical(const Formula& root, std::span<const std::size_t> path);

}  // namespace folmt

#endif  // FOLMT_CORE_HPP
