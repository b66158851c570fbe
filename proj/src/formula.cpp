#include "folmt/formula.hpp"

#include <algorithm>
#include <stdexcept>

namespace folmt {

struct Formula::Node {
  FormulaKind kind;
  bool value = false;
  std::string symbol;
  std::vector<Term> args;
  std::vector<Formula> children;
  std::size_t size = 1;
  std::size_t depth = 1;
};

Formula make_formula(FormulaKind kind, std::string symbol, std::vector<Term> args,
                     std::vector<Formula> children, bool value) {
  auto node = std::make_shared<Formula::Node>();
  node->kind = kind;
  node->value = value;
  node->symbol = std::move(symbol);
  node->args = std::move(args);
  node->children = std::move(children);
  std::size_t max_depth = 0;
  for (const auto& c : node->children) {
    node->size += c.size();
    max_depth = std::max(max_depth, c.depth());
  }
  node->depth = 1 + max_depth;
  return Formula(std::move(node));
}

namespace {

void check_identifier(const std::string& name, const char* what) {
  if (name.empty()) throw std::invalid_argument(std::string("empty ") + what + " name");
}

}  // namespace

Formula::Formula() {
  static const std::shared_ptr<const Node> shared_true = [] {
    auto n = std::make_shared<Node>();
    n->kind = FormulaKind::Bool;
    n->value = true;
    return n;
  }();
  node_ = shared_true;
}

FormulaKind Formula::kind() const noexcept { return node_->kind; }
const std::string& Formula::symbol() const noexcept { return node_->symbol; }
std::span<const Term> Formula::args() const noexcept { return node_->args; }
std::span<const Formula> Formula::children() const noexcept { return node_->children; }
bool Formula::value() const noexcept { return node_->value; }
std::size_t Formula::size() const noexcept { return node_->size; }
std::size_t Formula::depth() const noexcept { return node_->depth; }

const Formula& Formula::child(std::size_t i) const {
  if (i >= node_->children.size()) throw std::out_of_range("formula child index out of range");
  return node_->children[i];
}

Formula Formula::with_children(std::vector<Formula> children) const {
  return make_formula(node_->kind, node_->symbol, node_->args, std::move(children), node_->value);
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind || x.size != y.size || x.value != y.value || x.symbol != y.symbol ||
      x.args != y.args || x.children.size() != y.children.size())
    return false;
  for (std::size_t i = 0; i < x.children.size(); ++i)
    if (!(x.children[i] == y.children[i])) return false;
  return true;
}

Formula atom(std::string predicate, std::vector<Term> args) {
  check_identifier(predicate, "predicate");
  for (const auto& t : args) check_identifier(t.name, "term");
  return make_formula(FormulaKind::Atom, std::move(predicate), std::move(args), {}, false);
}

Formula boolean(bool value) { return make_formula(FormulaKind::Bool, {}, {}, {}, value); }

Formula negation(Formula body) { return make_formula(FormulaKind::Not, {}, {}, {std::move(body)}, false); }

Formula conjunction(std::vector<Formula> operands) {
  if (operands.size() < 2) throw std::invalid_argument("conjunction needs at least two operands");
  return make_formula(FormulaKind::And, {}, {}, std::move(operands), false);
}

Formula disjunction(std::vector<Formula> operands) {
  if (operands.size() < 2) throw std::invalid_argument("disjunction needs at least two operands");
  return make_formula(FormulaKind::Or, {}, {}, std::move(operands), false);
}

Formula implication(Formula antecedent, Formula consequent) {
  return make_formula(FormulaKind::Implies, {}, {}, {std::move(antecedent), std::move(consequent)}, false);
}

Formula biconditional(Formula left, Formula right) {
  return make_formula(FormulaKind::Iff, {}, {}, {std::move(left), std::move(right)}, false);
}

Formula quantified(FormulaKind kind, std::string variable, Formula body) {
  if (kind != FormulaKind::Forall && kind != FormulaKind::Exists)
    throw std::invalid_argument("quantified() needs Forall or Exists");
  check_identifier(variable, "variable");
  return make_formula(kind, std::move(variable), {}, {std::move(body)}, false);
}

Formula forall(std::string variable, Formula body) {
  return quantified(FormulaKind::Forall, std::move(variable), std::move(body));
}

Formula exists(std::string variable, Formula body) {
  return quantified(FormulaKind::Exists, std::move(variable), std::move(body));
}

const Formula& subformula(const Formula& phi, std::span<const std::size_t> path) {
  const Formula* cur = &phi;
  for (auto i : path) cur = &cur->child(i);
  return *cur;
}

Formula replace_at(const Formula& phi, std::span<const std::size_t> path, Formula replacement) {
  if (path.empty()) return replacement;
  std::vector<Formula> kids(phi.children().begin(), phi.children().end());
  if (path.front() >= kids.size()) throw std::out_of_range("path does not address a node");
  kids[path.front()] = replace_at(kids[path.front()], path.subspan(1), std::move(replacement));
  return phi.with_children(std::move(kids));
}

const char* kind_name(FormulaKind kind) noexcept {
  switch (kind) {
    case FormulaKind::Atom: return "Atom";
    case FormulaKind::Bool: return "Bool";
    case FormulaKind::Not: return "Not";
    case FormulaKind::And: return "And";
    case FormulaKind::Or: return "Or";
    case FormulaKind::Implies: return "Implies";
    case FormulaKind::Iff: return "Iff";
    case FormulaKind::Forall: return "Forall";
    case FormulaKind::Exists: return "Exists";
  }
  return "?";
}

}  // namespace folmt
