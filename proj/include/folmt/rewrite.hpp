#ifndef FOLMT_REWRITE_HPP
#define FOLMT_REWRITE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "folmt/core.hpp"
#include "folmt/formula.hpp"

namespace folmt {

// The twenty metamorphic relations. E1_* and E2_* rewrite single formulas;
// S*, P* and C* act on whole test cases (see pipeline.hpp).
enum class MrId : std::uint8_t {
  E1_1,  // implication and biconditional elimination
  E1_2,  // negation normalization
  E1_3,  // quantifier lifting
  E1_4,  // flattening and canonical ordering of And/Or
  E1_5,  // alpha-renaming of a conflicting bound variable
  E1_6,  // canonical ordering inside a quantifier block
  E2_1,  // idempotence and absorption
  E2_2,  // excluded middle and contradiction
  E2_3,  // identity and domination
  E2_4,  // distributivity
  S1,    // constant renaming
  S2,    // predicate renaming
  P1,    // premise reordering
  P2,    // premise duplication
  P3,    // irrelevant premise extension
  P4,    // premise fusion
  P5,    // premise decomposition
  C1,    // q & True
  C2,    // q | False
  C3,    // --q
};

inline constexpr std::array<MrId, 20> kAllMrs = {
    MrId::E1_1, MrId::E1_2, MrId::E1_3, MrId::E1_4, MrId::E1_5, MrId::E1_6, MrId::E2_1,
    MrId::E2_2, MrId::E2_3, MrId::E2_4, MrId::S1,   MrId::S2,   MrId::P1,   MrId::P2,
    MrId::P3,   MrId::P4,   MrId::P5,   MrId::C1,   MrId::C2,   MrId::C3,
};

enum class MrCategory : std::uint8_t { E, S, P, C };

inline constexpr std::array<MrCategory, 4> kAllCategories = {MrCategory::E, MrCategory::S, MrCategory::P,
                                                             MrCategory::C};

// "E1_1", "S2", ...
const char* to_string(MrId mr) noexcept;
// "MR-E1.1", "MR-S2", ...
std::string display_name(MrId mr);
// Accepts "E1_1", "E1.1" and "MR-E1.1".
std::optional<MrId> mr_from_string(std::string_view s) noexcept;
MrCategory category(MrId mr) noexcept;
// "MR-E", "MR-S", ...
const char* to_string(MrCategory c) noexcept;
bool is_formula_level(MrId mr) noexcept;

// A match of a rule's left-hand side.
struct Redex {
  MrId mr = MrId::E1_1;
  // Child indices from the root to the matched node.
  Path path;
  // Operand positions at the matched node that the rule acts on (E1_3/E1_5:
  // the quantified operand; E2_*: the interacting operands; E1_6: block
  // start and length).
  std::vector<std::size_t> operands;
  // Schema metavariables (phi, psi, x, y, Q, op, ...) to printed subformulas
  // or identifiers. Informational.
  std::map<std::string, std::string> binding;
  // The matched subtree; apply() refuses to rewrite anything else.
  Formula matched;
};

// All matches of a formula-level rule in leftmost-outermost order.
std::vector<Redex> find_redexes(const Formula& phi, MrId mr);

// One-step rewrite. Throws StaleRedex when `phi` does not contain the match.
Formula apply(const Formula& phi, const Redex& redex);

struct RewriteStep {
  Formula before;
  Formula after;
  Redex redex;
  Measure measure_before;
  Measure measure_after;
};

// One trace line: mr, path, before, after, measures.
std::string format_step(const RewriteStep& step);

struct NormalizeOptions {
  // When set, each stage picks uniformly among its eligible redexes instead
  // of the leftmost-outermost one.
  std::optional<std::uint64_t> shuffle_seed;
  // Zero selects the default of 10 * size^2.
  std::size_t step_budget = 0;
};

struct Normalization {
  Formula result;
  std::vector<RewriteStep> trace;
};

// Staged normalization to canonical prenex negation normal form: E1_1 to
// exhaustion, then E1_2, then quantifier lifting (E1_3, with E1_5 on a
// blocking conflict), then E1_4 bottom-up, then E1_6. Throws InternalError
// if the step budget runs out.
Normalization normalize_np(const Formula& phi, const NormalizeOptions& options = {});

enum class SymbolKind : std::uint8_t { Constant, Predicate };

// Uniform renaming. Throws NotPresent when `from` does not occur and NotFresh
// when `to` already does.
Formula rename_symbol(const Formula& phi, SymbolKind kind, const std::string& from, const std::string& to);

}  // namespace folmt

#endif  // FOLMT_REWRITE_HPP
