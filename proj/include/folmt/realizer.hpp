#ifndef FOLMT_REALIZER_HPP
#define FOLMT_REALIZER_HPP

#include <map>
#include <optional>
#include <string>

#include "folmt/formula.hpp"

namespace folmt {

class ChatClient;

enum class Phrasing { Standard, Placeholder, Relation };

const char* to_string(Phrasing p) noexcept;

struct LexEntry {
  Phrasing phrasing = Phrasing::Standard;
  std::string surface;
};

// Predicate phrasing table. Predicates without an entry get one derived from
// their name and arity.
class Lexicon {
 public:
  void set(const std::string& predicate, LexEntry entry) { entries_[predicate] = std::move(entry); }
  std::optional<LexEntry> find(const std::string& predicate) const;
  LexEntry lookup(const std::string& predicate, std::size_t arity) const;

  // Single capital letter with optional digits, or Pre/Pred/Pad followed by
  // digits.
  static bool is_placeholder(const std::string& name);
  static LexEntry derive(const std::string& predicate, std::size_t arity);

 private:
  std::map<std::string, LexEntry> entries_;
};

// Deterministic English rendering. Connectives are phrased with explicit
// scope markers ("both .. and", "either .. or", "if .., then"), negation is
// never folded, and the sentence ends with a period.
std::string realize(const Formula& phi, const Lexicon& lexicon = {});

// Translation by an external model under the translation prompts. Throws
// TransportError on transport failure and MalformedResponse when no
// translation can be extracted.
std::string realize_via_llm(const std::string& original_fol, const std::string& original_nl,
                            const Formula& transformed, ChatClient& client);

}  // namespace folmt

#endif  // FOLMT_REALIZER_HPP
