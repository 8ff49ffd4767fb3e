#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spvr/met.hpp"
#include "spvr/syntax.hpp"

namespace spvr {

// The inspection checks. The first six are the common pool shared across
// tree types; the rest are type-specific extras.
enum class CheckId {
  kPossibleVariableUse,
  kNumberLiteral,
  kFunctionCall,
  kTypeCast,
  kTypeCheck,
  kCondition,
  kMinMax,
  kTernary,
  kBufferWords,
  kScopeResolution,
  kInitialization,
  kPointer,
  kStaticMethod,
};

std::string to_string(CheckId id);

struct RuleConfig {
  // Minimum normalized-similarity for a context identifier to count as a
  // near-miss of a tree identifier.
  double similarity_threshold = 0.5;
  // How often a symbol must occur in the surrounding context to matter.
  int min_context_occurrences = 2;
  // At most this many findings survive per tree.
  int max_findings = 3;
};

// One fired check: a ready-to-use instruction sentence plus the symbols it
// talks about (verbatim source spellings).
struct RuleFinding {
  CheckId check = CheckId::kPossibleVariableUse;
  std::string instruction;
  std::vector<std::string> referenced_symbols;
  int priority = 0;  // 1-based position in the type's check order
};

// The ordered checks to run for a tree type. Throws UnsupportedMetType for
// types outside the six modeled ones.
std::vector<CheckId> applicable_checks(const std::string& met_type);

// Normalized Levenshtein similarity in [0, 1]: 1 - distance / max(length).
// Two empty strings are perfectly similar.
double normalized_similarity(const std::string& a, const std::string& b);

// --- individual checks ------------------------------------------------------
// Each returns nullopt when it does not fire. `tree`/`unit` are the
// vulnerable side the tree was built from.

// Variables the surrounding function uses but the tree does not: member paths
// whose parent recurs in the context, and context identifiers that are
// near-misses of tree identifiers.
std::optional<RuleFinding> possible_variable_use(const MinimumEditTree& met,
                                                 const SyntaxTree& tree,
                                                 const RuleConfig& config);

// Number literals other than 0 and 1 inside the tree.
std::optional<RuleFinding> check_number_literal(const MinimumEditTree& met,
                                                const SyntaxTree& tree);

// Function calls inside the tree.
std::optional<RuleFinding> check_function_call(const MinimumEditTree& met,
                                               const SyntaxTree& tree);

// Type casts inside the tree.
std::optional<RuleFinding> check_type_cast(const MinimumEditTree& met,
                                           const SyntaxTree& tree);

// Signed arithmetic types (int / long / double without `unsigned`).
std::optional<RuleFinding> check_type(const MinimumEditTree& met,
                                      const SyntaxTree& tree);

// Relational operators in the condition clause of an if/for tree. Throws
// UnsupportedMetType for other tree types.
std::optional<RuleFinding> check_condition(const MinimumEditTree& met,
                                           const SyntaxTree& tree);

// The type-specific extra checks for `met`'s type, in order.
std::vector<RuleFinding> run_extra_checks(const MinimumEditTree& met,
                                          const SyntaxTree& tree,
                                          const RuleConfig& config);

// Runs the full ordered check list for the tree's type and keeps at most
// config.max_findings findings, assigning 1-based priorities. Throws
// UnsupportedMetType for unmodeled types.
std::vector<RuleFinding> run_rules(const MinimumEditTree& met,
                                   const SyntaxTree& tree,
                                   const RuleConfig& config);

// Identifiers that should survive into regenerated code: the tree's condition
// identifiers plus everything a PossibleVariableUse finding names (member
// paths, their parents, and field names).
std::vector<std::string> keep_variables(const MinimumEditTree& met,
                                        const SyntaxTree& tree,
                                        const std::vector<RuleFinding>& findings);

}  // namespace spvr
