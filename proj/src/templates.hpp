#pragma once

// Internal access to the instruction-template data file, shared by the rule
// engine (finding sentences) and prompt assembly (layout, fallback).

#include <map>
#include <string>

namespace spvr::internal {

// Replaces every "{key}" in `text` with its mapped value.
std::string fill_template(std::string text,
                          const std::map<std::string, std::string>& values);

// The instruction sentence template for a check; picks the no-symbol variant
// when `with_symbols` is false and one exists.
std::string check_template(const std::string& check_name, bool with_symbols);

// "This {met_type} has a problem of {description}." skeleton.
std::string cwe_sentence_template();

// Instruction used when no check fired.
std::string fallback_template();

// Whole-prompt layout with {cwe_part} / {met_part} / {regen_code} / {met_type}.
std::string prompt_layout_template();

}  // namespace spvr::internal
