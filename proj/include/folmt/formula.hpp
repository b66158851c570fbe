#ifndef FOLMT_FORMULA_HPP
#define FOLMT_FORMULA_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace folmt {

// A predicate argument. There are no function symbols: every term is either a
// variable or a constant, decided by binding context when parsed.
struct Term {
  enum class Kind : std::uint8_t { Variable, Constant };

  Kind kind = Kind::Constant;
  std::string name;

  static Term variable(std::string name) { return {Kind::Variable, std::move(name)}; }
  static Term constant(std::string name) { return {Kind::Constant, std::move(name)}; }

  bool is_variable() const noexcept { return kind == Kind::Variable; }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

enum class FormulaKind : std::uint8_t { Atom, Bool, Not, And, Or, Implies, Iff, Forall, Exists };

using Path = std::vector<std::size_t>;

// Immutable first-order formula. Copies share structure; nodes are never
// mutated after construction, so values may be shared freely across threads.
class Formula {
 public:
  // The formula `True`.
  Formula();

  FormulaKind kind() const noexcept;

  bool is_atom() const noexcept { return kind() == FormulaKind::Atom; }
  bool is_bool() const noexcept { return kind() == FormulaKind::Bool; }
  // Atoms and boolean constants.
  bool is_atomic() const noexcept { return is_atom() || is_bool(); }
  bool is_quantifier() const noexcept {
    return kind() == FormulaKind::Forall || kind() == FormulaKind::Exists;
  }
  bool is_junction() const noexcept { return kind() == FormulaKind::And || kind() == FormulaKind::Or; }

  // Predicate name of an atom, bound variable of a quantifier, empty otherwise.
  const std::string& symbol() const noexcept;
  std::span<const Term> args() const noexcept;
  std::span<const Formula> children() const noexcept;
  const Formula& child(std::size_t i) const;
  bool value() const noexcept;

  // Node count.
  std::size_t size() const noexcept;
  // Height of the tree; atoms and constants have depth 1.
  std::size_t depth() const noexcept;

  // Same node kind and symbol with replaced children.
  Formula with_children(std::vector<Formula> children) const;

  // Identity of the shared node, for cheap "unchanged" checks.
  bool same_node(const Formula& other) const noexcept { return node_ == other.node_; }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  friend Formula make_formula(FormulaKind, std::string, std::vector<Term>, std::vector<Formula>, bool);

  std::shared_ptr<const Node> node_;
};

Formula make_formula(FormulaKind kind, std::string symbol, std::vector<Term> args,
                     std::vector<Formula> children, bool value);

Formula atom(std::string predicate, std::vector<Term> args = {});
Formula boolean(bool value);
inline Formula truth() { return boolean(true); }
inline Formula falsity() { return boolean(false); }
Formula negation(Formula body);
// And/Or require at least two operands.
Formula conjunction(std::vector<Formula> operands);
Formula disjunction(std::vector<Formula> operands);
Formula implication(Formula antecedent, Formula consequent);
Formula biconditional(Formula left, Formula right);
Formula forall(std::string variable, Formula body);
Formula exists(std::string variable, Formula body);
Formula quantified(FormulaKind kind, std::string variable, Formula body);

// Subtree addressed by child indices from the root.
const Formula& subformula(const Formula& phi, std::span<const std::size_t> path);
Formula replace_at(const Formula& phi, std::span<const std::size_t> path, Formula replacement);

const char* kind_name(FormulaKind kind) noexcept;

}  // namespace folmt

#endif  // FOLMT_FORMULA_HPP
