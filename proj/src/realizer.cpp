#include "folmt/realizer.hpp"

#include <cctype>

#include "folmt/chat.hpp"
#include "folmt/errors.hpp"
#include "folmt/prompts.hpp"
#include "folmt/syntax.hpp"

namespace folmt {

namespace {

bool all_digits(const std::string& s, std::size_t from) {
  for (std::size_t i = from; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

std::string join_terms(std::span<const Term> args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += i + 1 == args.size() ? (args.size() > 2 ? ", and " : " and ") : ", ";
    out += args[i].name;
  }
  return out;
}

class Realizer {
 public:
  explicit Realizer(const Lexicon& lex) : lex_(lex) {}

  std::string text(const Formula& f) const {
    switch (f.kind()) {
      case FormulaKind::Bool:
        return f.value() ? "it is logically true" : "it is logically false";
      case FormulaKind::Atom:
        return atom_text(f);
      case FormulaKind::Not:
        return "it is not the case that " + text(f.child(0));
      case FormulaKind::And:
        return conjunction_text(f);
      case FormulaKind::Or:
        return disjunction_text(f);
      case FormulaKind::Implies:
        return "if " + text(f.child(0)) + ", then " + text(f.child(1));
      case FormulaKind::Iff: {
        std::string out = text(f.child(0));
        out += complex(f.child(0)) ? ", if and only if" : " if and only if";
        out += complex(f.child(1)) ? ", " : " ";
        return out + text(f.child(1));
      }
      case FormulaKind::Forall:
        return "For all " + f.symbol() + ", " + text(f.child(0));
      case FormulaKind::Exists:
        return "There exists at least one " + f.symbol() + ", such that " + text(f.child(0));
    }
    return {};
  }

 private:
  static bool complex(const Formula& f) { return f.depth() > 1; }

  std::string atom_text(const Formula& f) const {
    const auto args = f.args();
    const auto entry = lex_.lookup(f.symbol(), args.size());
    switch (args.size()) {
      case 0:
        return entry.phrasing == Phrasing::Placeholder ? "proposition " + entry.surface + " holds"
                                                       : entry.surface + " holds";
      case 1:
        if (entry.phrasing == Phrasing::Standard) return args[0].name + " is " + entry.surface;
        return args[0].name + " has property " + entry.surface;
      case 2:
        return args[0].name + " bears relation " + entry.surface + " to " + args[1].name;
      default:
        return join_terms(args) + " stand in relation " + entry.surface + " in that order";
    }
  }

  std::string conjunction_text(const Formula& f) const {
    if (f.children().size() == 2) {
      const auto& a = f.child(0);
      return "both " + text(a) + (complex(a) ? ", and " : " and ") + text(f.child(1));
    }
    return list_text("all of ", f, "and");
  }

  std::string disjunction_text(const Formula& f) const {
    if (f.children().size() == 2) {
      const auto& a = f.child(0);
      const auto& b = f.child(1);
      if (a == b) {
        auto t = text(a);
        return "either " + t + " is true or " + t + " is true";
      }
      return "either " + text(a) + " or " + text(b);
    }
    return list_text("at least one of ", f, "or");
  }

  std::string list_text(const std::string& lead, const Formula& f, const std::string& last) const {
    std::string out = lead;
    const auto n = f.children().size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out += ", ";
      if (i + 1 == n) out += last + " ";
      out += text(f.child(i));
    }
    return out;
  }

  const Lexicon& lex_;
};

}  // namespace

const char* to_string(Phrasing p) noexcept {
  switch (p) {
    case Phrasing::Standard: return "standard";
    case Phrasing::Placeholder: return "placeholder";
    case Phrasing::Relation: return "relation";
  }
  return "?";
}

std::optional<LexEntry> Lexicon::find(const std::string& predicate) const {
  auto it = entries_.find(predicate);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

LexEntry Lexicon::lookup(const std::string& predicate, std::size_t arity) const {
  if (auto e = find(predicate)) return *e;
  return derive(predicate, arity);
}

bool Lexicon::is_placeholder(const std::string& name) {
  if (name.empty()) return false;
  if (std::isupper(static_cast<unsigned char>(name[0])) && all_digits(name, 1)) return true;
  for (const char* stem : {"Pred", "Pre", "Pad"}) {
    const std::string s = stem;
    if (name.size() > s.size() && name.compare(0, s.size(), s) == 0 && all_digits(name, s.size())) return true;
  }
  return false;
}

LexEntry Lexicon::derive(const std::string& predicate, std::size_t arity) {
  if (arity >= 2) return {Phrasing::Relation, predicate};
  return {is_placeholder(predicate) ? Phrasing::Placeholder : Phrasing::Standard, predicate};
}

std::string realize(const Formula& phi, const Lexicon& lexicon) { return Realizer(lexicon).text(phi) + "."; }

std::string realize_via_llm(const std::string& original_fol, const std::string& original_nl,
                            const Formula& transformed, ChatClient& client) {
  ChatRequest req;
  req.messages.push_back({"system", std::string(prompt_text(PromptId::TranslateSystem))});
  req.messages.push_back({"user", fill_template(prompt_text(PromptId::TranslateUser),
                                                {{"original_fol", original_fol},
                                                 {"original_nl", original_nl},
                                                 {"transformed_fol", print_formula(transformed)}})});
  const auto reply = client.complete(req);
  auto obj = extract_json_object(reply, "translation");
  if (!obj || !(*obj)["translation"].is_string())
    throw MalformedResponse("translation reply has no \"translation\" string");
  return (*obj)["translation"].get<std::string>();
}

}  // namespace folmt
