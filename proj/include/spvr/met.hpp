#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spvr/source.hpp"
#include "spvr/syntax.hpp"

namespace spvr {

enum class EditSide { kVulnerable, kFixed };

// One contiguous run of changed lines on one side of a vulnerable/fixed pair.
// byte_range is trimmed to the non-whitespace payload of the run; a pure
// insertion on the other side is represented as a zero-width byte_range
// anchored at the first code byte of the enclosing line.
struct EditSpan {
  EditSide side = EditSide::kVulnerable;
  std::uint32_t start_line = 0;  // 1-based, inclusive
  std::uint32_t end_line = 0;    // 1-based, inclusive
  ByteSpan byte_range;

  bool operator==(const EditSpan&) const = default;
};

// Line-level diff of the two sides, as parallel span lists (vulnerable side
// first). Identical texts yield two empty lists.
std::pair<std::vector<EditSpan>, std::vector<EditSpan>> compute_edit_spans(
    const SourceUnit& vulnerable, const SourceUnit& fixed);

// The span of an inclusive 1-based line range of `unit`, trimmed exactly as
// diffed hunks are. Used when suspected lines are given instead of a fixed
// version. Throws SpanOutOfRange for lines outside the text.
EditSpan span_for_line_range(const SourceUnit& unit, int start_line,
                             int end_line,
                             EditSide side = EditSide::kVulnerable);

// The smallest expression- or statement-subtype node of `tree` whose span
// contains every span in `edits`, chosen as the first qualifying node in
// pre-order; nullptr when no node qualifies. Throws EmptyEdits when `edits`
// is empty.
const SyntaxNode* get_minimum_tree(const SyntaxTree& tree,
                                   const std::vector<EditSpan>& edits,
                                   const KindTaxonomy& taxonomy);

// Why build_met produced no tree (or kOk when it did).
enum class MetFailure { kOk, kEmptyEdits, kNoQualifyingNode, kKindMismatch };

// Origin tag of a node in the merged vulnerable/fixed view.
enum class MergeOrigin { kShared, kVulnerableOnly, kFixedOnly };

struct MergedNode {
  std::string kind;
  MergeOrigin origin = MergeOrigin::kShared;
  bool named = true;
  std::vector<MergedNode> children;
};

// A minimum edit tree: the paired minimal subtrees of the vulnerable and
// fixed sides plus their merged, origin-tagged view. The node pointers point
// into the SyntaxTrees given to build_met and share their lifetime.
struct MinimumEditTree {
  const SyntaxNode* vulnerable_root = nullptr;
  const SyntaxNode* fixed_root = nullptr;  // null when located online
  std::string type;                        // root kind, e.g. "if_statement"
  MergedNode merged;
};

struct MetOutcome {
  std::optional<MinimumEditTree> met;
  MetFailure failure = MetFailure::kOk;
};

// Builds the minimum edit tree of a vulnerable/fixed pair, or nullopt when
// the two sides disagree (different root kinds, or either side has no
// qualifying node, or there are no edits at all).
std::optional<MinimumEditTree> build_met(const SyntaxTree& vulnerable_tree,
                                         const SyntaxTree& fixed_tree,
                                         const std::vector<EditSpan>& vulnerable_edits,
                                         const std::vector<EditSpan>& fixed_edits,
                                         const KindTaxonomy& taxonomy);

// Same as build_met but also reports why no tree was produced.
MetOutcome build_met_outcome(const SyntaxTree& vulnerable_tree,
                             const SyntaxTree& fixed_tree,
                             const std::vector<EditSpan>& vulnerable_edits,
                             const std::vector<EditSpan>& fixed_edits,
                             const KindTaxonomy& taxonomy);

// Locates a minimum edit tree from the vulnerable side alone, given a single
// suspected span (no fixed code required). fixed_root stays null and the
// merged view carries only shared-origin nodes.
std::optional<MinimumEditTree> locate_met_online(const SyntaxTree& tree,
                                                 const EditSpan& span,
                                                 const KindTaxonomy& taxonomy);

// The tree's type (its root node kind).
std::string met_type(const MinimumEditTree& met);

// The six tree types the inspection rules and prompts model.
const std::vector<std::string>& modeled_met_types();

// True if `type` is one of the six modeled types.
bool is_modeled_met_type(const std::string& type);

// Merged view rendered as an indented outline, one node per line, with
// "[vuln]" / "[fixed]" suffixes on one-sided nodes. Used by the CLI.
std::string render_merged_outline(const MergedNode& node);

}  // namespace spvr
