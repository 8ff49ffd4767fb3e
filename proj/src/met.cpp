#include "spvr/met.hpp"

#include <algorithm>
#include <cctype>

#include "spvr/errors.hpp"

namespace spvr {

namespace {

// Line-level LCS diff. Returns hunks as 0-based half-open line ranges
// (v_begin, v_end, f_begin, f_end); at least one side of each hunk is
// non-empty.
struct Hunk {
  std::size_t v_begin, v_end, f_begin, f_end;
};

std::vector<Hunk> diff_lines(const std::vector<std::string>& v,
                             const std::vector<std::string>& f) {
  const std::size_t n = v.size(), m = f.size();
  std::vector<std::vector<std::uint32_t>> lcs(n + 1,
                                              std::vector<std::uint32_t>(m + 1));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = v[i] == f[j] ? lcs[i + 1][j + 1] + 1
                               : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  std::vector<Hunk> hunks;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && v[i] == f[j]) {
      ++i;
      ++j;
      continue;
    }
    Hunk h{i, i, j, j};
    while (i < n || j < m) {
      if (i < n && j < m && v[i] == f[j]) break;
      if (i < n && (j >= m || lcs[i + 1][j] >= lcs[i][j + 1])) {
        ++i;
      } else {
        ++j;
      }
    }
    h.v_end = i;
    h.f_end = j;
    hunks.push_back(h);
  }
  return hunks;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Span of a 0-based half-open line range, trimmed to its code payload:
// leading/trailing whitespace and trailing statement terminators dropped.
// An all-whitespace range degrades to a zero-width span at its first line.
EditSpan span_for_lines(EditSide side, const std::string& text,
                        const LineIndex& index, std::size_t begin,
                        std::size_t end) {
  EditSpan span;
  span.side = side;
  span.start_line = static_cast<std::uint32_t>(begin + 1);
  span.end_line = static_cast<std::uint32_t>(end);  // inclusive
  std::uint32_t lo = index.line_start(span.start_line);
  std::uint32_t hi = index.line_end(span.end_line);
  while (lo < hi && is_space(text[lo])) ++lo;
  while (hi > lo && is_space(text[hi - 1])) --hi;
  // Strip trailing terminators: the `;` belongs to the statement node, not to
  // the expression under it, and keeping it would pin every single-line edit
  // to expression_statement.
  std::uint32_t stripped = hi;
  while (stripped > lo &&
         (text[stripped - 1] == ';' || is_space(text[stripped - 1]))) {
    --stripped;
  }
  if (stripped > lo) hi = stripped;
  if (lo >= hi) {
    // Whitespace-only change: anchor a zero-width span at the line start.
    lo = hi = index.line_start(span.start_line);
  }
  span.byte_range = {lo, hi};
  return span;
}

// Zero-width insertion anchor before 0-based line `line` (== line count means
// end of text). Anchored at the first code byte of the enclosing line so the
// span stays inside that line's statement.
EditSpan anchor_for_insertion(EditSide side, const std::string& text,
                              const LineIndex& index, std::size_t line) {
  EditSpan span;
  span.side = side;
  std::uint32_t line_count = index.line_count();
  std::uint32_t enclosing =
      line < line_count ? static_cast<std::uint32_t>(line + 1) : line_count;
  span.start_line = span.end_line = enclosing;
  std::uint32_t at;
  if (line < line_count) {
    at = index.line_start(enclosing);
    std::uint32_t end = index.line_end(enclosing);
    while (at < end && is_space(text[at])) ++at;
  } else {
    at = static_cast<std::uint32_t>(text.size());
  }
  span.byte_range = {at, at};
  return span;
}

const SyntaxNode* minimum_tree_node(const SyntaxNode& node,
                                    const std::vector<EditSpan>& edits,
                                    const KindTaxonomy& taxonomy) {
  auto contains_all = [&](const SyntaxNode& n) {
    return std::all_of(edits.begin(), edits.end(), [&](const EditSpan& e) {
      return n.contains(e.byte_range);
    });
  };
  if (!contains_all(node)) return nullptr;  // children can't contain more
  if (taxonomy.qualifies(node.kind)) {
    bool child_holds_all =
        std::any_of(node.children.begin(), node.children.end(), contains_all);
    if (!child_holds_all) return &node;
  }
  for (const SyntaxNode& c : node.children) {
    if (const SyntaxNode* hit = minimum_tree_node(c, edits, taxonomy)) {
      return hit;
    }
  }
  return nullptr;
}

MergedNode tag_subtree(const SyntaxNode& node, MergeOrigin origin) {
  MergedNode out;
  out.kind = node.kind;
  out.origin = origin;
  out.named = node.named;
  for (const SyntaxNode& c : node.children) {
    out.children.push_back(tag_subtree(c, origin));
  }
  return out;
}

// Merges same-kind nodes: children are aligned by an LCS over their kind
// sequences, unmatched children keep their side's origin tag.
MergedNode merge_nodes(const SyntaxNode& v, const SyntaxNode& f) {
  MergedNode out;
  out.kind = v.kind;
  out.origin = MergeOrigin::kShared;
  out.named = v.named;

  const auto& a = v.children;
  const auto& b = f.children;
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::uint32_t>> lcs(n + 1,
                                              std::vector<std::uint32_t>(m + 1));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = a[i].kind == b[j].kind
                      ? lcs[i + 1][j + 1] + 1
                      : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i].kind == b[j].kind &&
        lcs[i][j] == lcs[i + 1][j + 1] + 1) {
      out.children.push_back(merge_nodes(a[i], b[j]));
      ++i;
      ++j;
    } else if (i < n && (j >= m || lcs[i + 1][j] >= lcs[i][j + 1])) {
      out.children.push_back(tag_subtree(a[i], MergeOrigin::kVulnerableOnly));
      ++i;
    } else {
      out.children.push_back(tag_subtree(b[j], MergeOrigin::kFixedOnly));
      ++j;
    }
  }
  return out;
}

void render_outline(const MergedNode& node, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += node.kind;
  if (node.origin == MergeOrigin::kVulnerableOnly) out += " [vuln]";
  if (node.origin == MergeOrigin::kFixedOnly) out += " [fixed]";
  out += '\n';
  for (const MergedNode& c : node.children) render_outline(c, depth + 1, out);
}

}  // namespace

std::pair<std::vector<EditSpan>, std::vector<EditSpan>> compute_edit_spans(
    const SourceUnit& vulnerable, const SourceUnit& fixed) {
  std::vector<std::string> v_lines = split_lines(vulnerable.text);
  std::vector<std::string> f_lines = split_lines(fixed.text);
  LineIndex v_index(vulnerable.text);
  LineIndex f_index(fixed.text);

  std::pair<std::vector<EditSpan>, std::vector<EditSpan>> out;
  for (const Hunk& h : diff_lines(v_lines, f_lines)) {
    if (h.v_end > h.v_begin) {
      out.first.push_back(span_for_lines(EditSide::kVulnerable, vulnerable.text,
                                         v_index, h.v_begin, h.v_end));
    } else {
      out.first.push_back(anchor_for_insertion(
          EditSide::kVulnerable, vulnerable.text, v_index, h.v_begin));
    }
    if (h.f_end > h.f_begin) {
      out.second.push_back(span_for_lines(EditSide::kFixed, fixed.text, f_index,
                                          h.f_begin, h.f_end));
    } else {
      out.second.push_back(
          anchor_for_insertion(EditSide::kFixed, fixed.text, f_index, h.f_begin));
    }
  }
  return out;
}

EditSpan span_for_line_range(const SourceUnit& unit, int start_line,
                             int end_line, EditSide side) {
  LineIndex index(unit.text);
  if (start_line < 1 || end_line < start_line ||
      static_cast<std::uint32_t>(start_line) > index.line_count()) {
    throw SpanOutOfRange("line range " + std::to_string(start_line) + ".." +
                         std::to_string(end_line) +
                         " lies outside a text of " +
                         std::to_string(index.line_count()) + " lines");
  }
  std::size_t end = std::min<std::size_t>(static_cast<std::size_t>(end_line),
                                          index.line_count());
  return span_for_lines(side, unit.text, index,
                        static_cast<std::size_t>(start_line - 1), end);
}

const SyntaxNode* get_minimum_tree(const SyntaxTree& tree,
                                   const std::vector<EditSpan>& edits,
                                   const KindTaxonomy& taxonomy) {
  if (edits.empty()) {
    throw EmptyEdits("cannot locate a minimum edit tree without edit spans");
  }
  return minimum_tree_node(tree.root(), edits, taxonomy);
}

MetOutcome build_met_outcome(const SyntaxTree& vulnerable_tree,
                             const SyntaxTree& fixed_tree,
                             const std::vector<EditSpan>& vulnerable_edits,
                             const std::vector<EditSpan>& fixed_edits,
                             const KindTaxonomy& taxonomy) {
  MetOutcome out;
  if (vulnerable_edits.empty() || fixed_edits.empty()) {
    out.failure = MetFailure::kEmptyEdits;
    return out;
  }
  const SyntaxNode* v = get_minimum_tree(vulnerable_tree, vulnerable_edits, taxonomy);
  const SyntaxNode* f = get_minimum_tree(fixed_tree, fixed_edits, taxonomy);
  if (v == nullptr || f == nullptr) {
    out.failure = MetFailure::kNoQualifyingNode;
    return out;
  }
  if (v->kind != f->kind) {
    out.failure = MetFailure::kKindMismatch;
    return out;
  }
  MinimumEditTree met;
  met.vulnerable_root = v;
  met.fixed_root = f;
  met.type = v->kind;
  met.merged = merge_nodes(*v, *f);
  out.met = std::move(met);
  out.failure = MetFailure::kOk;
  return out;
}

std::optional<MinimumEditTree> build_met(const SyntaxTree& vulnerable_tree,
                                         const SyntaxTree& fixed_tree,
                                         const std::vector<EditSpan>& vulnerable_edits,
                                         const std::vector<EditSpan>& fixed_edits,
                                         const KindTaxonomy& taxonomy) {
  return build_met_outcome(vulnerable_tree, fixed_tree, vulnerable_edits,
                           fixed_edits, taxonomy)
      .met;
}

std::optional<MinimumEditTree> locate_met_online(const SyntaxTree& tree,
                                                 const EditSpan& span,
                                                 const KindTaxonomy& taxonomy) {
  const SyntaxNode* v = get_minimum_tree(tree, {span}, taxonomy);
  if (v == nullptr) return std::nullopt;
  MinimumEditTree met;
  met.vulnerable_root = v;
  met.fixed_root = nullptr;
  met.type = v->kind;
  met.merged = tag_subtree(*v, MergeOrigin::kShared);
  return met;
}

std::string met_type(const MinimumEditTree& met) { return met.type; }

const std::vector<std::string>& modeled_met_types() {
  static const std::vector<std::string> types = {
      "if_statement",   "assignment_expression", "call_expression",
      "declaration",    "for_statement",         "function_definition",
  };
  return types;
}

bool is_modeled_met_type(const std::string& type) {
  const auto& types = modeled_met_types();
  return std::find(types.begin(), types.end(), type) != types.end();
}

std::string render_merged_outline(const MergedNode& node) {
  std::string out;
  render_outline(node, 0, out);
  return out;
}

}  // namespace spvr
