#include "folmt/core.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace folmt {

namespace {

void collect_free(const Formula& f, std::vector<std::string>& bound, NameSet& out) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      for (const auto& t : f.args())
        if (t.is_variable() && std::find(bound.begin(), bound.end(), t.name) == bound.end())
          out.insert(t.name);
      return;
    case FormulaKind::Bool:
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      bound.push_back(f.symbol());
      collect_free(f.child(0), bound, out);
      bound.pop_back();
      return;
    default:
      for (const auto& c : f.children()) collect_free(c, bound, out);
  }
}

void collect_all(const Formula& f, NameSet& vars, NameSet* consts,
                 std::map<std::string, std::size_t>* preds) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      if (preds) preds->emplace(f.symbol(), f.args().size());
      for (const auto& t : f.args()) {
        if (t.is_variable())
          vars.insert(t.name);
        else if (consts)
          consts->insert(t.name);
      }
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      vars.insert(f.symbol());
      break;
    default:
      break;
  }
  for (const auto& c : f.children()) collect_all(c, vars, consts, preds);
}

// Innermost binding wins; `bound` is searched from the back.
struct Scope {
  std::vector<std::pair<std::string, std::string>> bound;  // name, code
  std::size_t level = 0;

  const std::string* lookup(const std::string& name) const {
    for (auto it = bound.rbegin(); it != bound.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }
};

void append_term(const Term& t, const Scope& scope, std::string& out) {
  if (!t.is_variable()) {
    out += t.name;
    return;
  }
  if (const auto* code = scope.lookup(t.name)) {
    out += *code;
  } else {
    out += '?';
    out += t.name;
  }
}

const char* junction_separator(FormulaKind k) {
  switch (k) {
    case FormulaKind::And: return " & ";
    case FormulaKind::Or: return " | ";
    case FormulaKind::Implies: return " -> ";
    case FormulaKind::Iff: return " <-> ";
    default: return "";
  }
}

void serialize(const Formula& f, Scope& scope, std::string& out) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      out += f.symbol();
      if (!f.args().empty()) {
        out += '(';
        bool first = true;
        for (const auto& t : f.args()) {
          if (!first) out += ',';
          first = false;
          append_term(t, scope, out);
        }
        out += ')';
      }
      return;
    case FormulaKind::Bool:
      out += f.value() ? '1' : '0';
      return;
    case FormulaKind::Not:
      out += '-';
      serialize(f.child(0), scope, out);
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      std::string code = "@" + std::to_string(scope.level);
      out += f.kind() == FormulaKind::Forall ? "forall " : "exists ";
      out += code;
      out += ". ";
      scope.bound.emplace_back(f.symbol(), std::move(code));
      ++scope.level;
      serialize(f.child(0), scope, out);
      --scope.level;
      scope.bound.pop_back();
      return;
    }
    default: {
      out += '(';
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) out += junction_separator(f.kind());
        first = false;
        serialize(c, scope, out);
      }
      out += ')';
    }
  }
}

// Scope for the operands of the node at `path`: prefix binders get block
// codes, other enclosing binders get their nesting level.
Scope scope_at(const Formula& root, std::span<const std::size_t> path) {
  Scope scope;
  const Formula* cur = &root;
  bool in_prefix = true;
  std::size_t block = 0;
  bool have_kind = false;
  FormulaKind last = FormulaKind::Forall;
  auto enter = [&](const Formula& q) {
    std::string code;
    if (in_prefix) {
      if (have_kind && q.kind() != last) ++block;
      have_kind = true;
      last = q.kind();
      code = "#" + std::to_string(block);
    } else {
      code = "@" + std::to_string(scope.level);
    }
    scope.bound.emplace_back(q.symbol(), std::move(code));
    ++scope.level;
  };
  for (auto idx : path) {
    if (cur->is_quantifier())
      enter(*cur);
    else
      in_prefix = false;
    cur = &cur->child(idx);
  }
  if (cur->is_quantifier()) enter(*cur);
  return scope;
}

std::size_t widest_junction(const Formula& f) {
  std::size_t w = f.is_junction() ? f.children().size() : 0;
  for (const auto& c : f.children()) w = std::max(w, widest_junction(c));
  return w;
}

struct MeasureWalk {
  std::uint64_t base;
  Measure m;

  // Returns the contextual key of `f`.
  std::string walk(const Formula& f, Scope& scope, std::size_t depth, std::size_t connectives_above,
                   bool in_prefix, std::size_t& block, bool& have_kind, FormulaKind& last) {
    switch (f.kind()) {
      case FormulaKind::Atom:
      case FormulaKind::Bool: {
        std::string out;
        serialize(f, scope, out);
        return out;
      }
      case FormulaKind::Forall:
      case FormulaKind::Exists: {
        std::string code;
        if (in_prefix) {
          if (have_kind && f.kind() != last) ++block;
          have_kind = true;
          last = f.kind();
          code = "#" + std::to_string(block);
        } else {
          m.quantifier_depth += connectives_above;
          code = "@" + std::to_string(scope.level);
        }
        std::string out = f.kind() == FormulaKind::Forall ? "forall " : "exists ";
        out += code;
        out += ". ";
        scope.bound.emplace_back(f.symbol(), std::move(code));
        ++scope.level;
        out += walk(f.child(0), scope, depth + 1, connectives_above, in_prefix, block, have_kind, last);
        --scope.level;
        scope.bound.pop_back();
        return out;
      }
      case FormulaKind::Not: {
        const auto& body = f.child(0);
        if (!body.is_atomic())
          m.negation_weight += boost::multiprecision::pow(Weight(base), static_cast<unsigned>(body.depth()));
        return "-" + walk(body, scope, depth + 1, connectives_above + 1, false, block, have_kind, last);
      }
      default:
        break;
    }
    if (f.kind() == FormulaKind::Implies || f.kind() == FormulaKind::Iff) ++m.implications;
    std::vector<std::string> keys;
    keys.reserve(f.children().size());
    for (const auto& c : f.children())
      keys.push_back(walk(c, scope, depth + 1, connectives_above + 1, false, block, have_kind, last));
    if (f.is_junction()) {
      bool canonical = std::is_sorted(keys.begin(), keys.end());
      for (const auto& c : f.children())
        if (c.kind() == f.kind()) canonical = false;
      if (!canonical) {
        m.structure += Weight(1) << depth;
      }
      const auto kids = f.children();
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (!kids[i].is_quantifier()) continue;
        for (std::size_t j = 0; j < kids.size(); ++j) {
          if (j == i) continue;
          if (free_vars(kids[j]).contains(kids[i].symbol())) {
            ++m.conflicts;
            break;
          }
        }
      }
    }
    std::string out = "(";
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (i) out += junction_separator(f.kind());
      out += keys[i];
    }
    out += ')';
    return out;
  }
};

void first_occurrences(const Formula& f, std::vector<std::string>& inner, const std::vector<std::string>& prefix,
                       std::vector<std::size_t>& first, std::size_t& counter) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      for (const auto& t : f.args()) {
        if (!t.is_variable()) continue;
        std::size_t pos = counter++;
        if (std::find(inner.begin(), inner.end(), t.name) != inner.end()) continue;
        for (std::size_t k = prefix.size(); k-- > 0;) {
          if (prefix[k] == t.name) {
            first[k] = std::min(first[k], pos);
            break;
          }
        }
      }
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      inner.push_back(f.symbol());
      first_occurrences(f.child(0), inner, prefix, first, counter);
      inner.pop_back();
      return;
    default:
      for (const auto& c : f.children()) first_occurrences(c, inner, prefix, first, counter);
  }
}

}  // namespace

NameSet free_vars(const Formula& phi) {
  NameSet out;
  std::vector<std::string> bound;
  collect_free(phi, bound, out);
  return out;
}

NameSet all_vars(const Formula& phi) {
  NameSet vars;
  collect_all(phi, vars, nullptr, nullptr);
  return vars;
}

NameSet constants(const Formula& phi) {
  NameSet vars, consts;
  collect_all(phi, vars, &consts, nullptr);
  return consts;
}

std::map<std::string, std::size_t> predicates(const Formula& phi) {
  NameSet vars;
  std::map<std::string, std::size_t> preds;
  collect_all(phi, vars, nullptr, &preds);
  return preds;
}

std::string fresh_name(const std::string& prefix, const NameSet& avoid) {
  for (std::size_t k = 1;; ++k) {
    std::string candidate = prefix + std::to_string(k);
    if (!avoid.contains(candidate)) return candidate;
  }
}

Formula substitute(const Formula& phi, const std::string& x, const Term& t) {
  switch (phi.kind()) {
    case FormulaKind::Atom: {
      bool changed = false;
      std::vector<Term> args(phi.args().begin(), phi.args().end());
      for (auto& a : args) {
        if (a.is_variable() && a.name == x) {
          a = t;
          changed = true;
        }
      }
      return changed ? atom(phi.symbol(), std::move(args)) : phi;
    }
    case FormulaKind::Bool:
      return phi;
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      const auto& y = phi.symbol();
      if (y == x) return phi;
      const Formula& body = phi.child(0);
      if (!free_vars(body).contains(x)) return phi;
      if (t.is_variable() && t.name == y) {
        NameSet avoid = all_vars(body);
        avoid.insert(x);
        avoid.insert(t.name);
        std::string z = fresh_name("v", avoid);
        Formula renamed = substitute(body, y, Term::variable(z));
        return quantified(phi.kind(), z, substitute(renamed, x, t));
      }
      return quantified(phi.kind(), y, substitute(body, x, t));
    }
    default: {
      std::vector<Formula> kids;
      kids.reserve(phi.children().size());
      bool changed = false;
      for (const auto& c : phi.children()) {
        kids.push_back(substitute(c, x, t));
        if (!kids.back().same_node(c)) changed = true;
      }
      return changed ? phi.with_children(std::move(kids)) : phi;
    }
  }
}

namespace {

bool alpha_rec(const Formula& a, const Formula& b, std::vector<std::string>& ba, std::vector<std::string>& bb) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case FormulaKind::Atom: {
      if (a.symbol() != b.symbol() || a.args().size() != b.args().size()) return false;
      auto index_of = [](const std::vector<std::string>& stack, const std::string& name) -> std::ptrdiff_t {
        for (std::size_t k = stack.size(); k-- > 0;)
          if (stack[k] == name) return static_cast<std::ptrdiff_t>(k);
        return -1;
      };
      for (std::size_t i = 0; i < a.args().size(); ++i) {
        const auto& ta = a.args()[i];
        const auto& tb = b.args()[i];
        if (ta.kind != tb.kind) return false;
        if (!ta.is_variable()) {
          if (ta.name != tb.name) return false;
          continue;
        }
        auto ia = index_of(ba, ta.name);
        auto ib = index_of(bb, tb.name);
        if (ia != ib) return false;
        if (ia < 0 && ta.name != tb.name) return false;
      }
      return true;
    }
    case FormulaKind::Bool:
      return a.value() == b.value();
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      ba.push_back(a.symbol());
      bb.push_back(b.symbol());
      bool r = alpha_rec(a.child(0), b.child(0), ba, bb);
      ba.pop_back();
      bb.pop_back();
      return r;
    }
    default:
      if (a.children().size() != b.children().size()) return false;
      for (std::size_t i = 0; i < a.children().size(); ++i)
        if (!alpha_rec(a.child(i), b.child(i), ba, bb)) return false;
      return true;
  }
}

}  // namespace

bool alpha_equal(const Formula& phi, const Formula& psi) {
  if (phi.size() != psi.size()) return false;
  std::vector<std::string> ba, bb;
  return alpha_rec(phi, psi, ba, bb);
}

std::string canonical_text(const Formula& phi) {
  Scope scope;
  std::string out;
  serialize(phi, scope, out);
  return out;
}

bool canonical_less(const Formula& a, const Formula& b) { return canonical_text(a) < canonical_text(b); }

std::vector<std::string> contextual_keys(const Formula& root, std::span<const std::size_t> path,
                                         std::span<const Formula> operands) {
  Scope scope = scope_at(root, path);
  std::vector<std::string> keys;
  keys.reserve(operands.size());
  for (const auto& op : operands) {
    std::string out;
    serialize(op, scope, out);
    keys.push_back(std::move(out));
  }
  return keys;
}

bool junction_is_canonical(const Formula& root, std::span<const std::size_t> path) {
  const Formula& node = subformula(root, path);
  if (!node.is_junction()) return true;
  for (const auto& c : node.children())
    if (c.kind() == node.kind()) return false;
  auto keys = contextual_keys(root, path, node.children());
  return std::is_sorted(keys.begin(), keys.end());
}

std::vector<PrefixBlock> prefix_blocks(const Formula& phi) {
  std::vector<PrefixBlock> blocks;
  const Formula* cur = &phi;
  std::size_t depth = 0;
  while (cur->is_quantifier()) {
    if (blocks.empty() || blocks.back().quantifier != cur->kind())
      blocks.push_back(PrefixBlock{cur->kind(), depth, {}});
    blocks.back().variables.push_back(cur->symbol());
    cur = &cur->child(0);
    ++depth;
  }
  return blocks;
}

std::size_t prefix_length(const Formula& phi) {
  std::size_t n = 0;
  for (const Formula* cur = &phi; cur->is_quantifier(); cur = &cur->child(0)) ++n;
  return n;
}

std::vector<std::size_t> prefix_first_occurrences(const Formula& phi) {
  std::vector<std::string> prefix;
  const Formula* cur = &phi;
  while (cur->is_quantifier()) {
    prefix.push_back(cur->symbol());
    cur = &cur->child(0);
  }
  std::vector<std::size_t> first(prefix.size(), std::numeric_limits<std::size_t>::max());
  std::vector<std::string> inner;
  std::size_t counter = 0;
  first_occurrences(*cur, inner, prefix, first, counter);
  return first;
}

Measure measure(const Formula& phi) {
  MeasureWalk w{1 + std::max<std::uint64_t>(2, widest_junction(phi)), {}};
  Scope scope;
  std::size_t block = 0;
  bool have_kind = false;
  FormulaKind last = FormulaKind::Forall;
  w.walk(phi, scope, 0, 0, true, block, have_kind, last);

  const auto first = prefix_first_occurrences(phi);
  for (const auto& b : prefix_blocks(phi)) {
    for (std::size_t i = 0; i + 1 < b.variables.size(); ++i)
      if (first[b.start + i] > first[b.start + i + 1]) ++w.m.block_disorder;
  }
  return w.m;
}

std::ostream& operator<<(std::ostream& os, const Measure& m) {
  return os << '(' << m.implications << ',' << m.negation_weight << ',' << m.quantifier_depth << ','
            << m.structure << ',' << m.conflicts << ',' << m.block_disorder << ')';
}

std::string to_string(const Measure& m) {
  std::ostringstream os;
  os << m;
  return os.str();
}

}  // namespace folmt
