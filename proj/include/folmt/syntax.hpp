#ifndef FOLMT_SYNTAX_HPP
#define FOLMT_SYNTAX_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "folmt/formula.hpp"

namespace folmt {

// Text grammar, loosest binding first:
//
//   formula := iff
//   iff     := impl ('<->' impl)*            left-associative
//   impl    := or ('->' impl)?               right-associative
//   or      := and (('|' | 'or') and)*
//   and     := neg (('&' | 'and') neg)*
//   neg     := ('-' | 'not') neg | quant | atom | '0' | '1' | '(' formula ')'
//   quant   := ('forall' | 'all' | 'exists') ident '.'? formula
//   atom    := ident '(' ident (',' ident)* ')' | ident
//
// A quantifier body extends as far right as possible. Term identifiers bound
// by an enclosing quantifier are variables; all others are constants. The
// glyphs ∀ ∃ ¬ ∧ ∨ → ↔ are accepted as aliases.
Formula parse_formula(std::string_view text);

// Every binary connective is parenthesized; quantifier operands of a
// connective are parenthesized as well.
std::string print_formula(const Formula& phi);

// Indented tree dump used by the `parse` subcommand.
std::string dump_ast(const Formula& phi);

enum class Label { True, False, Unknown };
enum class Origin { FOLIO, LogicNLI, ProverQA, Other };

const char* to_string(Label label) noexcept;
std::optional<Label> label_from_string(std::string_view s) noexcept;
const char* to_string(Origin origin) noexcept;
std::optional<Origin> origin_from_string(std::string_view s) noexcept;

// One test case: premises, conclusion, optional gold label, in both natural
// language and logical form.
struct SourceRecord {
  std::string id;
  std::vector<std::string> premises_nl;
  std::vector<Formula> premises_fol;
  std::string conclusion_nl;
  Formula conclusion_fol;
  std::optional<Label> gold_label;
  Origin origin = Origin::Other;
};

// Throws SyntaxError on malformed FOL and ConfigError on missing fields or
// mismatched premise lists.
SourceRecord record_from_json(const nlohmann::json& j, std::optional<Origin> default_origin = std::nullopt);
nlohmann::json record_to_json(const SourceRecord& record);

struct SkippedRecord {
  std::size_t line = 0;
  std::string id;
  std::string reason;
};

struct Dataset {
  std::vector<SourceRecord> records;
  std::vector<SkippedRecord> skipped;
};

// Line-delimited records. Blank lines are ignored; malformed records are
// skipped and reported, never fatal. Throws IoError when the file cannot be read.
Dataset load_dataset(const std::filesystem::path& path, std::optional<Origin> default_origin = std::nullopt);

void write_records(const std::filesystem::path& path, const std::vector<SourceRecord>& records);

}  // namespace folmt

#endif  // FOLMT_SYNTAX_HPP
