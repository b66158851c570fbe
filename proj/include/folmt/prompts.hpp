#ifndef FOLMT_PROMPTS_HPP
#define FOLMT_PROMPTS_HPP

#include <map>
#include <string>
#include <string_view>

namespace folmt {

// Prompt templates, embedded byte-for-byte from assets/prompts at build time.
enum class PromptId {
  EntailZeroShotSystem,
  EntailZeroShotCotSystem,
  EntailFewShotSystem,
  EntailFewShotCotSystem,
  EntailUser,
  TranslateSystem,
  TranslateUser,
  AuditSystem,
  AuditUser,
};

std::string_view prompt_text(PromptId id) noexcept;
// Asset file stem, e.g. "entail_user".
const char* prompt_name(PromptId id) noexcept;

// Replaces each `{key}` whose key is in `values`. Other braces are left
// alone, and substituted text is not rescanned.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

}  // namespace folmt

#endif  // FOLMT_PROMPTS_HPP
