#include "folmt/rewrite.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "folmt/errors.hpp"
#include "folmt/random.hpp"
#include "folmt/syntax.hpp"

namespace folmt {

namespace {

constexpr const char* kMrNames[] = {"E1_1", "E1_2", "E1_3", "E1_4", "E1_5", "E1_6", "E2_1",
                                    "E2_2", "E2_3", "E2_4", "S1",   "S2",   "P1",   "P2",
                                    "P3",   "P4",   "P5",   "C1",   "C2",   "C3"};

template <class Fn>
void preorder(const Formula& f, Path& path, Fn& fn) {
  fn(f, path);
  const auto kids = f.children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    path.push_back(i);
    preorder(kids[i], path, fn);
    path.pop_back();
  }
}

template <class Fn>
void for_each_node(const Formula& root, Fn fn) {
  Path path;
  preorder(root, path, fn);
}

FormulaKind dual(FormulaKind k) { return k == FormulaKind::And ? FormulaKind::Or : FormulaKind::And; }

Formula junction(FormulaKind k, std::vector<Formula> ops) {
  if (ops.size() == 1) return ops.front();
  return k == FormulaKind::And ? conjunction(std::move(ops)) : disjunction(std::move(ops));
}

std::vector<Formula> operands_of(const Formula& f) { return {f.children().begin(), f.children().end()}; }

std::vector<Formula> without(const Formula& f, std::size_t j) {
  auto ops = operands_of(f);
  ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(j));
  return ops;
}

// The operands other than j, as one formula, for bindings and side conditions.
Formula siblings(const Formula& f, std::size_t j) { return junction(f.kind(), without(f, j)); }

NameSet free_vars_except(const Formula& f, std::size_t j) {
  NameSet out;
  for (std::size_t i = 0; i < f.children().size(); ++i) {
    if (i == j) continue;
    auto fv = free_vars(f.child(i));
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

NameSet vars_except(const Formula& f, std::size_t j) {
  NameSet out;
  for (std::size_t i = 0; i < f.children().size(); ++i) {
    if (i == j) continue;
    auto v = all_vars(f.child(i));
    out.insert(v.begin(), v.end());
  }
  return out;
}

bool contains_quantifier(const Formula& f) {
  if (f.is_quantifier()) return true;
  for (const auto& c : f.children())
    if (contains_quantifier(c)) return true;
  return false;
}

bool contains_implication(const Formula& f) {
  if (f.kind() == FormulaKind::Implies || f.kind() == FormulaKind::Iff) return true;
  for (const auto& c : f.children())
    if (contains_implication(c)) return true;
  return false;
}

// A run of quantifiers over a quantifier-free body.
bool prenex_shaped(const Formula& f) {
  const Formula* cur = &f;
  while (cur->is_quantifier()) cur = &cur->child(0);
  return !contains_quantifier(*cur);
}

NameSet reserved_names(const Formula& root) {
  NameSet avoid = all_vars(root);
  auto c = constants(root);
  avoid.insert(c.begin(), c.end());
  return avoid;
}

Redex make_redex(MrId mr, const Path& path, const Formula& node, std::vector<std::size_t> operands = {}) {
  Redex r;
  r.mr = mr;
  r.path = path;
  r.operands = std::move(operands);
  r.matched = node;
  return r;
}

std::string quant_text(FormulaKind k) { return k == FormulaKind::Forall ? "forall" : "exists"; }

std::string op_text(FormulaKind k) { return k == FormulaKind::And ? "&" : "|"; }

// ---- matching ------------------------------------------------------------

void match_e1_1(const Formula& f, const Path& path, std::vector<Redex>& out) {
  if (f.kind() != FormulaKind::Implies && f.kind() != FormulaKind::Iff) return;
  auto r = make_redex(MrId::E1_1, path, f);
  r.binding = {{"phi", print_formula(f.child(0))},
               {"psi", print_formula(f.child(1))},
               {"op", f.kind() == FormulaKind::Implies ? "->" : "<->"}};
  out.push_back(std::move(r));
}

void match_e1_2(const Formula& f, const Path& path, std::vector<Redex>& out) {
  if (f.kind() != FormulaKind::Not || f.child(0).is_atomic()) return;
  const auto& body = f.child(0);
  if (body.kind() == FormulaKind::Implies || body.kind() == FormulaKind::Iff) return;
  auto r = make_redex(MrId::E1_2, path, f);
  std::string law = body.kind() == FormulaKind::Not ? "double-negation"
                    : body.is_junction()             ? "de-morgan"
                                                     : "quantifier-duality";
  r.binding = {{"phi", print_formula(body)}, {"law", law}};
  out.push_back(std::move(r));
}

void match_lift(const Formula& root, const Formula& f, const Path& path, MrId mr, std::vector<Redex>& out) {
  if (!f.is_junction()) return;
  for (std::size_t j = 0; j < f.children().size(); ++j) {
    const auto& q = f.child(j);
    if (!q.is_quantifier()) continue;
    const auto& x = q.symbol();
    auto r = make_redex(mr, path, f, {j});
    r.binding = {{"Q", quant_text(q.kind())},
                 {"x", x},
                 {"op", op_text(f.kind())},
                 {"phi", print_formula(q.child(0))},
                 {"psi", print_formula(siblings(f, j))}};
    if (mr == MrId::E1_3) {
      if (free_vars_except(f, j).contains(x)) continue;
    } else {
      if (!vars_except(f, j).contains(x)) continue;
      r.binding["y"] = fresh_name("v", reserved_names(root));
    }
    out.push_back(std::move(r));
  }
}

bool is_cluster_root(const Formula& root, const Path& path, const Formula& f) {
  if (path.empty()) return true;
  Path parent(path.begin(), path.end() - 1);
  return subformula(root, parent).kind() != f.kind();
}

void match_e1_4(const Formula& root, const Formula& f, const Path& path, std::vector<Redex>& out) {
  if (!f.is_junction() || !is_cluster_root(root, path, f)) return;
  if (junction_is_canonical(root, path)) return;
  auto r = make_redex(MrId::E1_4, path, f);
  r.binding = {{"op", op_text(f.kind())}};
  out.push_back(std::move(r));
}

void match_e1_6(const Formula& root, std::vector<Redex>& out) {
  const auto first = prefix_first_occurrences(root);
  for (const auto& b : prefix_blocks(root)) {
    bool disordered = false;
    for (std::size_t i = 0; i + 1 < b.variables.size(); ++i)
      if (first[b.start + i] > first[b.start + i + 1]) disordered = true;
    if (!disordered) continue;
    auto r = make_redex(MrId::E1_6, {}, root, {b.start, b.variables.size()});
    std::string vars;
    for (const auto& v : b.variables) vars += (vars.empty() ? "" : " ") + v;
    r.binding = {{"Q", quant_text(b.quantifier)}, {"block", vars}};
    out.push_back(std::move(r));
  }
}

bool absorbs(const Formula& node, std::size_t i, std::size_t j) {
  const auto& cj = node.child(j);
  if (cj.kind() != dual(node.kind())) return false;
  for (const auto& d : cj.children())
    if (alpha_equal(d, node.child(i))) return true;
  return false;
}

void match_e2_1(const Formula& f, const Path& path, std::vector<Redex>& out) {
  if (!f.is_junction()) return;
  const auto n = f.children().size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      bool idem = j > i && alpha_equal(f.child(i), f.child(j));
      if (!idem && !absorbs(f, i, j)) continue;
      auto r = make_redex(MrId::E2_1, path, f, {i, j});
      r.binding = {{"phi", print_formula(f.child(i))},
                   {"law", idem ? "idempotence" : "absorption"},
                   {"op", op_text(f.kind())}};
      if (!idem) r.binding["psi"] = print_formula(f.child(j));
      out.push_back(std::move(r));
    }
  }
}

void match_e2_2(const Formula& f, const Path& path, std::vector<Redex>& out) {
  if (!f.is_junction()) return;
  const auto n = f.children().size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& cj = f.child(j);
      if (i == j || cj.kind() != FormulaKind::Not || !alpha_equal(cj.child(0), f.child(i))) continue;
      auto r = make_redex(MrId::E2_2, path, f, {i, j});
      r.binding = {{"phi", print_formula(f.child(i))},
                   {"law", f.kind() == FormulaKind::Or ? "excluded-middle" : "contradiction"}};
      out.push_back(std::move(r));
    }
  }
}

void match_e2_3(const Formula& f, const Path& path, std::vector<Redex>& out) {
  if (!f.is_junction()) return;
  for (std::size_t j = 0; j < f.children().size(); ++j) {
    if (!f.child(j).is_bool()) continue;
    bool identity = f.child(j).value() == (f.kind() == FormulaKind::And);
    auto r = make_redex(MrId::E2_3, path, f, {j});
    r.binding = {{"phi", print_formula(siblings(f, j))}, {"law", identity ? "identity" : "domination"}};
    out.push_back(std::move(r));
  }
}

void match_e2_4(const Formula& f, const Path& path, std::vector<Redex>& out) {
  if (!f.is_junction()) return;
  for (std::size_t j = 0; j < f.children().size(); ++j) {
    const auto& cj = f.child(j);
    if (cj.kind() != dual(f.kind())) continue;
    auto r = make_redex(MrId::E2_4, path, f, {j});
    r.binding = {{"phi", print_formula(siblings(f, j))}, {"op", op_text(f.kind())}};
    for (std::size_t k = 0; k < cj.children().size(); ++k)
      r.binding["psi" + std::to_string(k + 1)] = print_formula(cj.child(k));
    out.push_back(std::move(r));
  }
}

// ---- rewriting -----------------------------------------------------------

[[noreturn]] void stale(const Redex& r, const std::string& why) {
  throw StaleRedex(std::string(to_string(r.mr)) + ": " + why);
}

Formula negate(const Formula& f) { return negation(f); }

Formula rewrite_e1_1(const Formula& f) {
  const auto& a = f.child(0);
  const auto& b = f.child(1);
  if (f.kind() == FormulaKind::Implies) return disjunction({negate(a), b});
  return conjunction({disjunction({negate(a), b}), disjunction({negate(b), a})});
}

Formula rewrite_e1_2(const Formula& f, const Redex& r) {
  const auto& body = f.child(0);
  switch (body.kind()) {
    case FormulaKind::Not:
      return body.child(0);
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> ops;
      for (const auto& c : body.children()) ops.push_back(negate(c));
      return junction(dual(body.kind()), std::move(ops));
    }
    case FormulaKind::Forall:
      return exists(body.symbol(), negate(body.child(0)));
    case FormulaKind::Exists:
      return forall(body.symbol(), negate(body.child(0)));
    default:
      stale(r, "negated formula has no inward rewrite");
  }
}

Formula rewrite_lift(const Formula& f, const Redex& r) {
  if (!f.is_junction() || r.operands.size() != 1 || r.operands[0] >= f.children().size())
    stale(r, "operand does not address a junction operand");
  const auto j = r.operands[0];
  const auto& q = f.child(j);
  if (!q.is_quantifier()) stale(r, "operand is not quantified");
  if (r.mr == MrId::E1_3) {
    if (free_vars_except(f, j).contains(q.symbol())) stale(r, "variable occurs free in a sibling");
    auto ops = operands_of(f);
    ops[j] = q.child(0);
    return quantified(q.kind(), q.symbol(), f.with_children(std::move(ops)));
  }
  auto it = r.binding.find("y");
  if (it == r.binding.end()) stale(r, "missing fresh variable");
  const auto& y = it->second;
  if (!vars_except(f, j).contains(q.symbol())) stale(r, "no conflict to resolve");
  if (all_vars(f).contains(y) || constants(f).contains(y)) stale(r, "replacement variable is not fresh");
  auto ops = operands_of(f);
  ops[j] = quantified(q.kind(), y, substitute(q.child(0), q.symbol(), Term::variable(y)));
  return f.with_children(std::move(ops));
}

void flatten_into(const Formula& f, FormulaKind k, std::vector<Formula>& out) {
  for (const auto& c : f.children()) {
    if (c.kind() == k)
      flatten_into(c, k, out);
    else
      out.push_back(c);
  }
}

Formula rewrite_e1_4(const Formula& root, const Path& path, const Formula& f) {
  std::vector<Formula> flat;
  flatten_into(f, f.kind(), flat);
  auto keys = contextual_keys(root, path, flat);
  std::vector<std::size_t> order(flat.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::vector<Formula> sorted;
  sorted.reserve(flat.size());
  for (auto i : order) sorted.push_back(flat[i]);
  return f.with_children(std::move(sorted));
}

Formula rewrite_e1_6(const Formula& root, const Redex& r) {
  if (r.operands.size() != 2) stale(r, "block operands missing");
  const auto start = r.operands[0];
  const auto len = r.operands[1];
  std::vector<std::pair<FormulaKind, std::string>> prefix;
  const Formula* cur = &root;
  while (cur->is_quantifier()) {
    prefix.emplace_back(cur->kind(), cur->symbol());
    cur = &cur->child(0);
  }
  if (len < 2 || start + len > prefix.size()) stale(r, "block out of range");
  for (std::size_t k = start; k < start + len; ++k)
    if (prefix[k].first != prefix[start].first) stale(r, "block is not uniform");

  // A binder shadowed by a later binder of the same block binds nothing; give
  // it a fresh name so the reordering cannot move it inward and capture.
  NameSet avoid = reserved_names(root);
  for (std::size_t k = start; k < start + len; ++k) {
    for (std::size_t l = k + 1; l < start + len; ++l) {
      if (prefix[l].second != prefix[k].second) continue;
      prefix[k].second = fresh_name("v", avoid);
      avoid.insert(prefix[k].second);
      break;
    }
  }

  const auto first = prefix_first_occurrences(root);
  std::vector<std::size_t> order(len);
  for (std::size_t i = 0; i < len; ++i) order[i] = start + i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return first[a] < first[b]; });

  std::vector<std::pair<FormulaKind, std::string>> rebuilt(prefix.begin(), prefix.end());
  for (std::size_t i = 0; i < len; ++i) rebuilt[start + i] = prefix[order[i]];
  Formula out = *cur;
  for (std::size_t k = rebuilt.size(); k-- > 0;) out = quantified(rebuilt[k].first, rebuilt[k].second, out);
  return out;
}

Formula drop(const Formula& f, std::size_t j) { return junction(f.kind(), without(f, j)); }

Formula rewrite_e2(const Formula& f, const Redex& r) {
  if (!f.is_junction()) stale(r, "not a conjunction or disjunction");
  const auto n = f.children().size();
  for (auto o : r.operands)
    if (o >= n) stale(r, "operand out of range");
  switch (r.mr) {
    case MrId::E2_1: {
      if (r.operands.size() != 2) stale(r, "expected two operands");
      auto [i, j] = std::pair{r.operands[0], r.operands[1]};
      if (i == j || !(alpha_equal(f.child(i), f.child(j)) || absorbs(f, i, j))) stale(r, "no redundancy");
      return drop(f, j);
    }
    case MrId::E2_2: {
      if (r.operands.size() != 2) stale(r, "expected two operands");
      const auto& cj = f.child(r.operands[1]);
      if (cj.kind() != FormulaKind::Not || !alpha_equal(cj.child(0), f.child(r.operands[0])))
        stale(r, "operands are not complementary");
      return boolean(f.kind() == FormulaKind::Or);
    }
    case MrId::E2_3: {
      if (r.operands.size() != 1) stale(r, "expected one operand");
      const auto& c = f.child(r.operands[0]);
      if (!c.is_bool()) stale(r, "operand is not a truth constant");
      if (c.value() == (f.kind() == FormulaKind::And)) return drop(f, r.operands[0]);
      return c;
    }
    case MrId::E2_4: {
      if (r.operands.size() != 1) stale(r, "expected one operand");
      const auto j = r.operands[0];
      const auto& cj = f.child(j);
      if (cj.kind() != dual(f.kind())) stale(r, "operand is not of the dual connective");
      std::vector<Formula> dist;
      for (const auto& d : cj.children()) {
        auto ops = operands_of(f);
        ops[j] = d;
        dist.push_back(f.with_children(std::move(ops)));
      }
      return junction(cj.kind(), std::move(dist));
    }
    default:
      stale(r, "not a simplification rule");
  }
}

Formula rename_rec(const Formula& f, SymbolKind kind, const std::string& from, const std::string& to) {
  if (f.is_atom()) {
    if (kind == SymbolKind::Predicate) {
      if (f.symbol() != from) return f;
      return atom(to, {f.args().begin(), f.args().end()});
    }
    std::vector<Term> args(f.args().begin(), f.args().end());
    bool changed = false;
    for (auto& t : args) {
      if (!t.is_variable() && t.name == from) {
        t.name = to;
        changed = true;
      }
    }
    return changed ? atom(f.symbol(), std::move(args)) : f;
  }
  if (f.children().empty()) return f;
  std::vector<Formula> kids;
  bool changed = false;
  for (const auto& c : f.children()) {
    kids.push_back(rename_rec(c, kind, from, to));
    if (!kids.back().same_node(c)) changed = true;
  }
  return changed ? f.with_children(std::move(kids)) : f;
}

// ---- normalization strategy ------------------------------------------------

std::vector<Redex> eligible_e1_1(const Formula& root) {
  std::vector<Redex> out;
  for_each_node(root, [&](const Formula& f, const Path& path) {
    if (f.kind() == FormulaKind::Iff && (contains_implication(f.child(0)) || contains_implication(f.child(1))))
      return;
    match_e1_1(f, path, out);
  });
  return out;
}

std::vector<Redex> eligible_e1_2(const Formula& root) { return find_redexes(root, MrId::E1_2); }

// Junctions whose operands are already prenex-shaped act on their leftmost
// quantified operand. Such junctions never nest, so the outcome does not
// depend on which one goes first.
std::vector<Redex> eligible_lift(const Formula& root) {
  std::vector<Redex> out;
  NameSet reserved;
  bool have_reserved = false;
  for_each_node(root, [&](const Formula& f, const Path& path) {
    if (!f.is_junction()) return;
    std::size_t j = SIZE_MAX;
    for (std::size_t i = 0; i < f.children().size(); ++i) {
      if (!prenex_shaped(f.child(i))) return;
      if (j == SIZE_MAX && f.child(i).is_quantifier()) j = i;
    }
    if (j == SIZE_MAX) return;
    const auto& q = f.child(j);
    auto r = make_redex(MrId::E1_3, path, f, {j});
    r.binding = {{"Q", quant_text(q.kind())}, {"x", q.symbol()}, {"op", op_text(f.kind())}};
    if (free_vars_except(f, j).contains(q.symbol())) {
      if (!have_reserved) {
        reserved = reserved_names(root);
        have_reserved = true;
      }
      r.mr = MrId::E1_5;
      r.binding["y"] = fresh_name("v", reserved);
    }
    out.push_back(std::move(r));
  });
  return out;
}

bool strictly_below(const Path& p, const Path& root) {
  return p.size() > root.size() && std::equal(root.begin(), root.end(), p.begin());
}

// A cluster may be sorted once every And/Or below it is canonical, since its
// sort keys are the printed forms of its operands.
std::vector<Redex> eligible_e1_4(const Formula& root) {
  std::vector<Path> dirty;
  for_each_node(root, [&](const Formula& f, const Path& path) {
    if (f.is_junction() && !junction_is_canonical(root, path)) dirty.push_back(path);
  });
  std::vector<Redex> out;
  for (const auto& p : dirty) {
    const Formula& f = subformula(root, p);
    if (!is_cluster_root(root, p, f)) continue;
    bool ready = true;
    for (const auto& q : dirty) {
      if (!strictly_below(q, p)) continue;
      // members of the same cluster are absorbed by the flattening
      const Formula* cur = &f;
      bool member = true;
      for (std::size_t k = p.size(); k < q.size(); ++k) {
        cur = &cur->child(q[k]);
        if (cur->kind() != f.kind()) member = false;
      }
      if (!member) {
        ready = false;
        break;
      }
    }
    if (!ready) continue;
    auto r = make_redex(MrId::E1_4, p, f);
    r.binding = {{"op", op_text(f.kind())}};
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

const char* to_string(MrId mr) noexcept { return kMrNames[static_cast<std::size_t>(mr)]; }

std::string display_name(MrId mr) {
  std::string s = to_string(mr);
  std::replace(s.begin(), s.end(), '_', '.');
  return "MR-" + s;
}

std::optional<MrId> mr_from_string(std::string_view s) noexcept {
  if (s.starts_with("MR-")) s.remove_prefix(3);
  std::string norm(s);
  std::replace(norm.begin(), norm.end(), '.', '_');
  for (std::size_t i = 0; i < kAllMrs.size(); ++i)
    if (norm == kMrNames[i]) return kAllMrs[i];
  return std::nullopt;
}

MrCategory category(MrId mr) noexcept {
  switch (kMrNames[static_cast<std::size_t>(mr)][0]) {
    case 'E': return MrCategory::E;
    case 'S': return MrCategory::S;
    case 'P': return MrCategory::P;
    default: return MrCategory::C;
  }
}

const char* to_string(MrCategory c) noexcept {
  switch (c) {
    case MrCategory::E: return "MR-E";
    case MrCategory::S: return "MR-S";
    case MrCategory::P: return "MR-P";
    case MrCategory::C: return "MR-C";
  }
  return "?";
}

bool is_formula_level(MrId mr) noexcept { return category(mr) == MrCategory::E; }

std::vector<Redex> find_redexes(const Formula& phi, MrId mr) {
  std::vector<Redex> out;
  if (mr == MrId::E1_6) {
    match_e1_6(phi, out);
    return out;
  }
  for_each_node(phi, [&](const Formula& f, const Path& path) {
    switch (mr) {
      case MrId::E1_1: match_e1_1(f, path, out); break;
      case MrId::E1_2: match_e1_2(f, path, out); break;
      case MrId::E1_3:
      case MrId::E1_5: match_lift(phi, f, path, mr, out); break;
      case MrId::E1_4: match_e1_4(phi, f, path, out); break;
      case MrId::E2_1: match_e2_1(f, path, out); break;
      case MrId::E2_2: match_e2_2(f, path, out); break;
      case MrId::E2_3: match_e2_3(f, path, out); break;
      case MrId::E2_4: match_e2_4(f, path, out); break;
      default: break;
    }
  });
  return out;
}

Formula apply(const Formula& phi, const Redex& redex) {
  if (!is_formula_level(redex.mr)) throw NotApplicable(std::string(to_string(redex.mr)) + " is not a formula rewrite");
  const Formula* node = &phi;
  for (auto idx : redex.path) {
    if (idx >= node->children().size()) stale(redex, "path does not address a node");
    node = &node->child(idx);
  }
  if (!node->same_node(redex.matched) && !(*node == redex.matched)) stale(redex, "subformula changed");

  Formula out;
  switch (redex.mr) {
    case MrId::E1_1:
      if (node->kind() != FormulaKind::Implies && node->kind() != FormulaKind::Iff)
        stale(redex, "not an implication");
      out = rewrite_e1_1(*node);
      break;
    case MrId::E1_2:
      if (node->kind() != FormulaKind::Not || node->child(0).is_atomic()) stale(redex, "not a compound negation");
      out = rewrite_e1_2(*node, redex);
      break;
    case MrId::E1_3:
    case MrId::E1_5:
      out = rewrite_lift(*node, redex);
      break;
    case MrId::E1_4:
      if (!node->is_junction()) stale(redex, "not a conjunction or disjunction");
      out = rewrite_e1_4(phi, redex.path, *node);
      break;
    case MrId::E1_6:
      if (!redex.path.empty()) stale(redex, "block reordering applies at the root");
      return rewrite_e1_6(phi, redex);
    default:
      out = rewrite_e2(*node, redex);
      break;
  }
  return replace_at(phi, redex.path, std::move(out));
}

std::string format_step(const RewriteStep& step) {
  std::ostringstream os;
  os << to_string(step.redex.mr) << '\t';
  if (step.redex.path.empty()) os << '.';
  for (std::size_t i = 0; i < step.redex.path.size(); ++i) os << (i ? "." : "") << step.redex.path[i];
  os << '\t' << print_formula(step.before) << '\t' << print_formula(step.after) << '\t' << step.measure_before
     << '\t' << step.measure_after;
  return os.str();
}

Normalization normalize_np(const Formula& phi, const NormalizeOptions& options) {
  std::optional<Rng> rng;
  if (options.shuffle_seed) rng.emplace(*options.shuffle_seed);
  const std::size_t n = phi.size();
  const std::size_t budget = options.step_budget ? options.step_budget : 10 * n * n;

  Normalization out{phi, {}};
  Measure current = measure(phi);

  auto run = [&](std::vector<Redex> (*eligible)(const Formula&)) {
    for (;;) {
      auto candidates = eligible(out.result);
      if (candidates.empty()) return;
      if (out.trace.size() >= budget)
        throw InternalError("normalization exceeded its step budget of " + std::to_string(budget));
      auto& pick = candidates[rng ? uniform_index(*rng, candidates.size()) : 0];
      Formula next = apply(out.result, pick);
      Measure m = measure(next);
      out.trace.push_back({out.result, next, std::move(pick), current, m});
      out.result = std::move(next);
      current = m;
    }
  };
  run(eligible_e1_1);
  run(eligible_e1_2);
  run(eligible_lift);
  run(eligible_e1_4);
  run([](const Formula& f) { return find_redexes(f, MrId::E1_6); });
  return out;
}

Formula rename_symbol(const Formula& phi, SymbolKind kind, const std::string& from, const std::string& to) {
  if (kind == SymbolKind::Constant) {
    auto consts = constants(phi);
    if (!consts.contains(from)) throw NotPresent("constant " + from + " does not occur");
    if (from != to && (consts.contains(to) || all_vars(phi).contains(to)))
      throw NotFresh("name " + to + " already occurs");
  } else {
    auto preds = predicates(phi);
    if (!preds.contains(from)) throw NotPresent("predicate " + from + " does not occur");
    if (from != to && preds.contains(to)) throw NotFresh("predicate " + to + " already occurs");
  }
  if (from == to) throw NotFresh("name " + to + " already occurs");
  return rename_rec(phi, kind, from, to);
}

}  // namespace folmt
