#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "spvr/source.hpp"
#include "spvr/syntax.hpp"

namespace spvr {

// Component scores of the composite code-similarity metric. `total` is the
// weighted sum of the four components.
struct CodeBleuScore {
  double ngram = 0.0;
  double weighted_ngram = 0.0;
  double syntax = 0.0;
  double dataflow = 0.0;
  double total = 0.0;
  std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};
  // True when the candidate failed to parse and the syntax / dataflow
  // components were pinned to zero.
  bool candidate_parse_failed = false;
};

// Composite similarity of candidate code against a single reference:
// smoothed 4-gram precision, keyword-weighted 4-gram precision, syntax
// subtree match, and def-use dataflow match, combined with `weights`
// (which must sum to 1). Throws EmptyReference when the reference has no
// code tokens.
CodeBleuScore codebleu(const std::string& candidate, const std::string& reference,
                       Language language = Language::kC,
                       const std::array<double, 4>& weights = {0.25, 0.25, 0.25,
                                                               0.25});

struct TreeDistanceOptions {
  // When true, leaf labels include the token text; internal labels are
  // always the node kind alone.
  bool leaf_text_in_label = true;
};

// Minimum number of node insertions, deletions, and relabelings (unit cost
// each) turning `a` into `b`, over ordered trees. Throws EmptyTree when
// either pointer is null.
int tree_edit_distance(const SyntaxNode* a, const SyntaxNode* b,
                       const SourceUnit& unit_a, const SourceUnit& unit_b,
                       const TreeDistanceOptions& options = {});

// Convenience: parses both snippets and measures distance between the
// resulting trees. Throws ParseFailure when either fails to parse.
int tree_edit_distance(const std::string& code_a, const std::string& code_b,
                       Language language = Language::kC,
                       const TreeDistanceOptions& options = {});

// Whole-string equality after collapsing every whitespace run (newlines
// included) to a single space and trimming the ends.
bool perfect_patch(const std::string& candidate, const std::string& reference);

// Collapses whitespace as perfect_patch does. Exposed for report output.
std::string normalize_whitespace(const std::string& text);

// Fraction of samples whose first k attempts contain at least one success.
// `outcomes` is one row per sample; every row must have at least k entries
// and all rows the same width, else ShapeMismatch. k must be >= 1.
double pass_at_k(const std::vector<std::vector<bool>>& outcomes, int k);

// Fraction of per-sample minimum distances strictly below `threshold`.
double edit_distance_rate(const std::vector<int>& min_distances,
                          int threshold = 5);

// One def-use chain: a use of `name` bound to its nearest preceding
// definition. def_ordinal counts that name's definitions (0-based) up to the
// binding one; use_ordinal counts that name's uses (0-based).
struct DataflowEdge {
  std::string name;
  int def_ordinal = 0;
  int use_ordinal = 0;

  auto operator<=>(const DataflowEdge&) const = default;
};

// The def-use edges of the code under `root`. Definitions are parameter
// bindings, declarators, and assignments to a plain identifier; uses are
// identifier reads. Uses with no preceding definition produce no edge.
std::vector<DataflowEdge> dataflow_edges(const SyntaxNode& root,
                                         const SourceUnit& unit);

}  // namespace spvr
