#include "folmt/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "folmt/errors.hpp"

namespace folmt {

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : Error([&] {
        std::ostringstream os;
        os << "syntax error at byte " << offset << ": expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
        os << "; found " << found;
        return os.str();
      }()),
      offset_(offset),
      expected_(std::move(expected)) {}

namespace {

enum class Tok {
  Ident,
  LParen,
  RParen,
  Comma,
  Dot,
  Not,
  And,
  Or,
  Implies,
  Iff,
  True,
  False,
  Forall,
  Exists,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view s) {
  struct Glyph {
    std::string_view bytes;
    Tok kind;
  };
  static constexpr Glyph glyphs[] = {
      {"\xE2\x88\x80", Tok::Forall}, {"\xE2\x88\x83", Tok::Exists}, {"\xC2\xAC", Tok::Not},
      {"\xE2\x88\xA7", Tok::And},    {"\xE2\x88\xA8", Tok::Or},     {"\xE2\x86\x92", Tok::Implies},
      {"\xE2\x86\x94", Tok::Iff},
  };
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      std::string word(s.substr(i, j - i));
      Tok kind = Tok::Ident;
      if (word == "forall" || word == "all")
        kind = Tok::Forall;
      else if (word == "exists")
        kind = Tok::Exists;
      else if (word == "not")
        kind = Tok::Not;
      else if (word == "and")
        kind = Tok::And;
      else if (word == "or")
        kind = Tok::Or;
      out.push_back({kind, std::move(word), i});
      i = j;
      continue;
    }
    auto rest = s.substr(i);
    if (rest.starts_with("<->")) {
      out.push_back({Tok::Iff, "<->", i});
      i += 3;
      continue;
    }
    if (rest.starts_with("->")) {
      out.push_back({Tok::Implies, "->", i});
      i += 2;
      continue;
    }
    bool matched = false;
    for (const auto& g : glyphs) {
      if (rest.starts_with(g.bytes)) {
        out.push_back({g.kind, std::string(g.bytes), i});
        i += g.bytes.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    Tok kind;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ',': kind = Tok::Comma; break;
      case '.': kind = Tok::Dot; break;
      case '-': kind = Tok::Not; break;
      case '&': kind = Tok::And; break;
      case '|': kind = Tok::Or; break;
      case '1': kind = Tok::True; break;
      case '0': kind = Tok::False; break;
      default:
        throw SyntaxError(i, {"identifier", "connective", "'('", "'0'", "'1'"},
                          "'" + std::string(1, static_cast<char>(c)) + "'");
    }
    if ((kind == Tok::True || kind == Tok::False) && i + 1 < s.size() &&
        std::isalnum(static_cast<unsigned char>(s[i + 1])))
      throw SyntaxError(i, {"identifier", "'0'", "'1'"}, "number");
    out.push_back({kind, std::string(1, static_cast<char>(c)), i});
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  Formula parse() {
    Formula f = iff();
    expect(Tok::End, {"connective", "end of input"});
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const auto& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.offset, std::move(expected), found);
  }

  const Token& expect(Tok k, std::vector<std::string> expected) {
    if (peek().kind != k) fail(std::move(expected));
    return toks_[pos_++];
  }

  Formula iff() {
    Formula left = impl();
    while (accept(Tok::Iff)) left = biconditional(std::move(left), impl());
    return left;
  }

  Formula impl() {
    Formula left = disj();
    if (accept(Tok::Implies)) return implication(std::move(left), impl());
    return left;
  }

  Formula disj() {
    std::vector<Formula> ops{conj()};
    while (accept(Tok::Or)) ops.push_back(conj());
    return ops.size() == 1 ? std::move(ops.front()) : disjunction(std::move(ops));
  }

  Formula conj() {
    std::vector<Formula> ops{neg()};
    while (accept(Tok::And)) ops.push_back(neg());
    return ops.size() == 1 ? std::move(ops.front()) : conjunction(std::move(ops));
  }

  Formula neg() {
    const auto& t = peek();
    switch (t.kind) {
      case Tok::Not:
        ++pos_;
        return negation(neg());
      case Tok::Forall:
      case Tok::Exists: {
        ++pos_;
        FormulaKind q = t.kind == Tok::Forall ? FormulaKind::Forall : FormulaKind::Exists;
        std::string var = expect(Tok::Ident, {"variable"}).text;
        accept(Tok::Dot);
        bound_.push_back(var);
        Formula body = iff();
        bound_.pop_back();
        return quantified(q, std::move(var), std::move(body));
      }
      case Tok::True:
        ++pos_;
        return truth();
      case Tok::False:
        ++pos_;
        return falsity();
      case Tok::LParen: {
        ++pos_;
        Formula inner = iff();
        expect(Tok::RParen, {"')'", "connective"});
        return inner;
      }
      case Tok::Ident:
        return atomic();
      default:
        fail({"'-'", "'not'", "quantifier", "identifier", "'0'", "'1'", "'('"});
    }
  }

  Formula atomic() {
    std::string pred = expect(Tok::Ident, {"predicate"}).text;
    std::vector<Term> args;
    if (accept(Tok::LParen)) {
      do {
        std::string name = expect(Tok::Ident, {"term"}).text;
        bool is_var = std::find(bound_.begin(), bound_.end(), name) != bound_.end();
        args.push_back(is_var ? Term::variable(std::move(name)) : Term::constant(std::move(name)));
      } while (accept(Tok::Comma));
      expect(Tok::RParen, {"','", "')'"});
    }
    return atom(std::move(pred), std::move(args));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> bound_;
};

bool ends_open(const Formula& f) {
  const Formula* cur = &f;
  while (cur->kind() == FormulaKind::Not) cur = &cur->child(0);
  return cur->is_quantifier();
}

void print_into(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      out += f.symbol();
      if (!f.args().empty()) {
        out += '(';
        for (std::size_t i = 0; i < f.args().size(); ++i) {
          if (i) out += ", ";
          out += f.args()[i].name;
        }
        out += ')';
      }
      return;
    case FormulaKind::Bool:
      out += f.value() ? '1' : '0';
      return;
    case FormulaKind::Not:
      out += '-';
      print_into(f.child(0), out);
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      out += f.kind() == FormulaKind::Forall ? "forall " : "exists ";
      out += f.symbol();
      out += ". ";
      print_into(f.child(0), out);
      return;
    default:
      break;
  }
  const char* sep = f.kind() == FormulaKind::And       ? " & "
                    : f.kind() == FormulaKind::Or      ? " | "
                    : f.kind() == FormulaKind::Implies ? " -> "
                                                       : " <-> ";
  out += '(';
  for (std::size_t i = 0; i < f.children().size(); ++i) {
    if (i) out += sep;
    const auto& c = f.child(i);
    if (ends_open(c)) {
      out += '(';
      print_into(c, out);
      out += ')';
    } else {
      print_into(c, out);
    }
  }
  out += ')';
}

void dump_into(const Formula& f, int indent, std::ostringstream& os) {
  os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << kind_name(f.kind());
  switch (f.kind()) {
    case FormulaKind::Atom:
      os << ' ' << f.symbol() << '(';
      for (std::size_t i = 0; i < f.args().size(); ++i) {
        const auto& t = f.args()[i];
        os << (i ? ", " : "") << (t.is_variable() ? "var " : "const ") << t.name;
      }
      os << ")\n";
      return;
    case FormulaKind::Bool:
      os << ' ' << (f.value() ? "True" : "False") << '\n';
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      os << ' ' << f.symbol() << '\n';
      break;
    default:
      os << '\n';
  }
  for (const auto& c : f.children()) dump_into(c, indent + 1, os);
}

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

std::string print_formula(const Formula& phi) {
  std::string out;
  print_into(phi, out);
  return out;
}

std::string dump_ast(const Formula& phi) {
  std::ostringstream os;
  dump_into(phi, 0, os);
  return os.str();
}

const char* to_string(Label label) noexcept {
  switch (label) {
    case Label::True: return "True";
    case Label::False: return "False";
    case Label::Unknown: return "Unknown";
  }
  return "?";
}

std::optional<Label> label_from_string(std::string_view s) noexcept {
  if (s == "True") return Label::True;
  if (s == "False") return Label::False;
  if (s == "Unknown") return Label::Unknown;
  return std::nullopt;
}

const char* to_string(Origin origin) noexcept {
  switch (origin) {
    case Origin::FOLIO: return "FOLIO";
    case Origin::LogicNLI: return "LogicNLI";
    case Origin::ProverQA: return "ProverQA";
    case Origin::Other: return "Other";
  }
  return "?";
}

std::optional<Origin> origin_from_string(std::string_view s) noexcept {
  if (s == "FOLIO") return Origin::FOLIO;
  if (s == "LogicNLI") return Origin::LogicNLI;
  if (s == "ProverQA") return Origin::ProverQA;
  if (s == "Other") return Origin::Other;
  return std::nullopt;
}

SourceRecord record_from_json(const nlohmann::json& j, std::optional<Origin> default_origin) {
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("record is missing field '") + key + "'");
    return j.at(key);
  };
  SourceRecord r;
  try {
    r.id = require("id").get<std::string>();
    r.premises_nl = require("premises_nl").get<std::vector<std::string>>();
    for (const auto& p : require("premises_fol")) r.premises_fol.push_back(parse_formula(p.get<std::string>()));
    r.conclusion_nl = require("conclusion_nl").get<std::string>();
    r.conclusion_fol = parse_formula(require("conclusion_fol").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("record field has the wrong type: ") + e.what());
  }
  if (r.premises_nl.size() != r.premises_fol.size())
    throw ConfigError("record '" + r.id + "' has " + std::to_string(r.premises_nl.size()) +
                      " natural-language premises but " + std::to_string(r.premises_fol.size()) + " FOL premises");
  if (j.contains("label") && !j.at("label").is_null()) {
    const auto& lj = j.at("label");
    auto label = lj.is_string() ? label_from_string(lj.get<std::string>()) : std::nullopt;
    if (!label) throw ConfigError("record '" + r.id + "' has an invalid label " + lj.dump());
    r.gold_label = *label;
  }
  if (j.contains("origin") && !j.at("origin").is_null()) {
    auto origin = origin_from_string(j.at("origin").get<std::string>());
    if (!origin) throw ConfigError("record '" + r.id + "' has an unknown origin");
    r.origin = *origin;
  } else if (default_origin) {
    r.origin = *default_origin;
  }
  return r;
}

nlohmann::json record_to_json(const SourceRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["premises_nl"] = r.premises_nl;
  auto fol = nlohmann::json::array();
  for (const auto& p : r.premises_fol) fol.push_back(print_formula(p));
  j["premises_fol"] = std::move(fol);
  j["conclusion_nl"] = r.conclusion_nl;
  j["conclusion_fol"] = print_formula(r.conclusion_fol);
  j["label"] = r.gold_label ? nlohmann::json(to_string(*r.gold_label)) : nlohmann::json(nullptr);
  j["origin"] = to_string(r.origin);
  return j;
}

Dataset load_dataset(const std::filesystem::path& path, std::optional<Origin> default_origin) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  Dataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    std::string id;
    try {
      auto j = nlohmann::json::parse(line);
      if (j.is_object() && j.contains("id") && j["id"].is_string()) id = j["id"].get<std::string>();
      ds.records.push_back(record_from_json(j, default_origin));
    } catch (const nlohmann::json::parse_error& e) {
      ds.skipped.push_back({lineno, id, std::string("malformed record: ") + e.what()});
    } catch (const Error& e) {
      ds.skipped.push_back({lineno, id, e.what()});
    }
  }
  if (in.bad()) throw IoError("error while reading " + path.string());
  return ds;
}

void write_records(const std::filesystem::path& path, const std::vector<SourceRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
  if (!out) throw IoError("error while writing " + path.string());
}

}  // namespace folmt
