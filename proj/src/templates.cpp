#include "templates.hpp"

#include <nlohmann/json.hpp>

#include "spvr/data.hpp"

namespace spvr::internal {

namespace {

const nlohmann::json& templates() {
  static const nlohmann::json parsed =
      nlohmann::json::parse(spvr::data::instruction_templates_json());
  return parsed;
}

}  // namespace

std::string fill_template(std::string text,
                          const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string needle = "{" + key + "}";
    std::size_t at = 0;
    while ((at = text.find(needle, at)) != std::string::npos) {
      text.replace(at, needle.size(), value);
      at += value.size();
    }
  }
  return text;
}

std::string check_template(const std::string& check_name, bool with_symbols) {
  const auto& entry = templates().at("checks").at(check_name);
  if (!with_symbols && entry.contains("template_no_symbols")) {
    return entry.at("template_no_symbols").get<std::string>();
  }
  return entry.at("template").get<std::string>();
}

std::string cwe_sentence_template() {
  return templates().at("cwe_sentence").get<std::string>();
}

std::string fallback_template() {
  return templates().at("fallback").get<std::string>();
}

std::string prompt_layout_template() {
  return templates().at("prompt_layout").get<std::string>();
}

}  // namespace spvr::internal
