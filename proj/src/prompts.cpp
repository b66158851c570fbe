#include "folmt/prompts.hpp"

#include "prompt_assets.inc"

namespace folmt {

std::string_view prompt_text(PromptId id) noexcept {
  switch (id) {
    case PromptId::EntailZeroShotSystem: return kPrompt_entail_zero_shot_system;
    case PromptId::EntailZeroShotCotSystem: return kPrompt_entail_zero_shot_cot_system;
    case PromptId::EntailFewShotSystem: return kPrompt_entail_few_shot_system;
    case PromptId::EntailFewShotCotSystem: return kPrompt_entail_few_shot_cot_system;
    case PromptId::EntailUser: return kPrompt_entail_user;
    case PromptId::TranslateSystem: return kPrompt_translate_system;
    case PromptId::TranslateUser: return kPrompt_translate_user;
    case PromptId::AuditSystem: return kPrompt_audit_system;
    case PromptId::AuditUser: return kPrompt_audit_user;
  }
  return {};
}

const char* prompt_name(PromptId id) noexcept {
  switch (id) {
    case PromptId::EntailZeroShotSystem: return "entail_zero_shot_system";
    case PromptId::EntailZeroShotCotSystem: return "entail_zero_shot_cot_system";
    case PromptId::EntailFewShotSystem: return "entail_few_shot_system";
    case PromptId::EntailFewShotCotSystem: return "entail_few_shot_cot_system";
    case PromptId::EntailUser: return "entail_user";
    case PromptId::TranslateSystem: return "translate_system";
    case PromptId::TranslateUser: return "translate_user";
    case PromptId::AuditSystem: return "audit_system";
    case PromptId::AuditUser: return "audit_user";
  }
  return "";
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

}  // namespace folmt
