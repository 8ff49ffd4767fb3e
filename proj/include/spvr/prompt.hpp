#pragma once

#include <string>
#include <vector>

#include "spvr/met.hpp"
#include "spvr/rules.hpp"
#include "spvr/syntax.hpp"

namespace spvr {

struct PromptOptions {
  // Upper bound on the characters of regenerated code in one prompt.
  std::size_t regen_char_budget = 3000;
};

// One ready-to-send repair prompt. A sample yields one bundle per finding
// (or a single fallback bundle when no check fired); cwe_part and regen_code
// are shared across a sample's bundles, met_part differs.
struct PromptBundle {
  std::string sample_id;
  int ordinal = 1;  // 1-based within the sample
  std::string cwe_part;
  std::string met_part;
  std::string regen_code;
  std::string assembled;
};

// The weakness sentence for a tree: "This <type> has a problem of <name>.".
// Throws UnknownCwe for ids outside the shipped top-25 table and
// UnsupportedMetType for unmodeled tree types.
std::string cwe_info(const std::string& cwe_id, const std::string& met_type);

// True if `cwe_id` is in the shipped top-25 table.
bool is_top25_cwe(const std::string& cwe_id);

// The human-readable weakness name for `cwe_id`. Throws UnknownCwe.
std::string cwe_name(const std::string& cwe_id);

// Rebuilds the code context around the tree, by whole verbatim source lines:
// if/for keep the header plus body statements that mention a keep variable,
// contain a string literal, or are a return; function definitions keep a
// prefix of the function; assignment/call/declaration trees keep the tree
// plus the code after it. Output never exceeds options.regen_char_budget
// characters (but always keeps at least the tree's first line).
std::string regenerate_code(const MinimumEditTree& met, const SyntaxTree& tree,
                            const std::vector<std::string>& keep_vars,
                            const PromptOptions& options = {});

// Builds the prompt bundles for one sample: cwe sentence + one instruction
// per finding (or the fallback instruction) + regenerated code + output
// directive. Throws UnknownCwe / UnsupportedMetType as cwe_info does.
std::vector<PromptBundle> assemble_prompts(const std::string& sample_id,
                                           const std::string& cwe_id,
                                           const MinimumEditTree& met,
                                           const SyntaxTree& tree,
                                           const std::vector<RuleFinding>& findings,
                                           const PromptOptions& options = {});

}  // namespace spvr
