#include "spvr/syntax.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "parser.hpp"
#include "spvr/data.hpp"
#include "spvr/errors.hpp"
#include "spvr/lexer.hpp"

namespace spvr {

namespace {

constexpr std::string_view kFragmentPrefix = "void __spvr_fragment__(void) {\n";
constexpr std::string_view kFragmentSuffix = "\n}";
constexpr std::string_view kFragmentSuffixExpr = "\n;\n}";

// Shifts a wrapped-parse subtree back into original-text coordinates,
// dropping nodes that lie wholly inside the synthetic wrapper and clamping
// nodes that straddle its edges. Returns nullopt for dropped nodes.
std::optional<SyntaxNode> rebase(const SyntaxNode& node, std::uint32_t prefix,
                                 std::uint32_t text_size) {
  std::uint32_t lo = prefix;
  std::uint32_t hi = prefix + text_size;
  if (node.span.end <= lo || node.span.start >= hi) return std::nullopt;
  SyntaxNode out;
  out.kind = node.kind;
  out.named = node.named;
  out.span = {std::max(node.span.start, lo) - lo,
              std::min(node.span.end, hi) - lo};
  for (const SyntaxNode& c : node.children) {
    if (auto r = rebase(c, prefix, text_size)) out.children.push_back(*std::move(r));
  }
  return out;
}

struct Attempt {
  std::unique_ptr<SyntaxNode> root;
  int errors = std::numeric_limits<int>::max();
  bool wrapped = false;
};

Attempt attempt_direct(const std::string& text) {
  internal::ParseAttempt p = internal::parse_translation_unit(text);
  return {std::move(p.root), p.error_nodes, false};
}

Attempt attempt_wrapped(const std::string& text, std::string_view suffix) {
  std::string padded;
  padded.reserve(kFragmentPrefix.size() + text.size() + suffix.size());
  padded.append(kFragmentPrefix).append(text).append(suffix);
  internal::ParseAttempt p = internal::parse_translation_unit(padded);

  // Locate the synthetic function's body; anything else means the wrap
  // didn't help at all.
  const SyntaxNode* body = nullptr;
  if (!p.root->children.empty() &&
      p.root->children.front().kind == "function_definition") {
    const auto& fn = p.root->children.front().children;
    if (!fn.empty() && fn.back().kind == "compound_statement") {
      body = &fn.back();
    }
  }
  if (body == nullptr) return {};

  auto root = std::make_unique<SyntaxNode>();
  root->kind = "translation_unit";
  root->named = true;
  auto prefix = static_cast<std::uint32_t>(kFragmentPrefix.size());
  auto size = static_cast<std::uint32_t>(text.size());
  for (const SyntaxNode& c : body->children) {
    if (auto r = rebase(c, prefix, size)) root->children.push_back(*std::move(r));
  }
  if (root->children.empty()) return {};
  Attempt out;
  // Score the whole padded parse, not just the surviving subtree: a fragment
  // that ends mid-block "closes" itself by stealing the synthetic brace, and
  // the resulting damage lands on the wrapper rather than inside the rebased
  // window.  Counting only rebased ERROR nodes would hide that.
  out.errors = p.error_nodes;
  out.root = std::move(root);
  out.wrapped = true;
  return out;
}

bool all_children_are_errors(const SyntaxNode& root) {
  bool any_named = false;
  for (const SyntaxNode& c : root.children) {
    if (c.kind != "ERROR") any_named = true;
  }
  return !any_named;
}

// Inserts `leaf` (a comment or preprocessor line) into the deepest node whose
// span contains it, keeping children ordered by start offset.
void insert_trivia(SyntaxNode& node, SyntaxNode leaf) {
  for (SyntaxNode& c : node.children) {
    if (leaf.span.start >= c.span.start && leaf.span.end <= c.span.end) {
      insert_trivia(c, std::move(leaf));
      return;
    }
  }
  auto it = std::find_if(node.children.begin(), node.children.end(),
                         [&](const SyntaxNode& c) {
                           return c.span.start >= leaf.span.end;
                         });
  node.children.insert(it, std::move(leaf));
}

void assign_lines(SyntaxNode& node, const LineIndex& index) {
  node.start_line = index.line_of(node.span.start);
  node.end_line = node.span.size() > 0 ? index.line_of(node.span.end - 1)
                                       : node.start_line;
  for (SyntaxNode& c : node.children) assign_lines(c, index);
}

bool is_blank(const std::string& text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

}  // namespace

SyntaxTree parse(const SourceUnit& unit) {
  if (is_blank(unit.text)) {
    throw ParseFailure("source text is empty");
  }
  LexResult lexed = lex(unit.text);
  if (lexed.tokens.empty() && lexed.trivia.empty()) {
    throw ParseFailure("source text contains no tokens");
  }

  Attempt best;
  if (!lexed.tokens.empty()) {
    best = attempt_direct(unit.text);
    if (best.errors > 0) {
      for (std::string_view suffix : {kFragmentSuffix, kFragmentSuffixExpr}) {
        Attempt alt = attempt_wrapped(unit.text, suffix);
        if (alt.root != nullptr && alt.errors < best.errors) {
          best = std::move(alt);
          if (best.errors == 0) break;
        }
      }
    }
  }
  if (best.root == nullptr || best.root->children.empty() ||
      all_children_are_errors(*best.root)) {
    if (lexed.tokens.empty()) {
      // Comment-only input still parses: the tree is just trivia.
      best.root = std::make_unique<SyntaxNode>();
      best.root->kind = "translation_unit";
      best.errors = 0;
      best.wrapped = false;
    } else {
      throw ParseFailure("grammar produced only error nodes at the root");
    }
  }

  SyntaxNode& root = *best.root;
  root.span = {0, static_cast<std::uint32_t>(unit.text.size())};
  for (const Token& t : lexed.trivia) {
    SyntaxNode leaf;
    leaf.kind = t.kind == TokenKind::kComment ? "comment" : "preproc_directive";
    leaf.span = t.span();
    leaf.named = true;
    insert_trivia(root, std::move(leaf));
  }
  LineIndex index(unit.text);
  assign_lines(root, index);
  return SyntaxTree(unit, std::move(best.root), best.errors > 0, best.wrapped);
}

SourceUnit strip_comments(const SourceUnit& unit) {
  SyntaxTree tree = parse(unit);
  std::vector<ByteSpan> comments;
  walk(tree.root(), [&](const SyntaxNode& n) {
    if (n.kind == "comment") comments.push_back(n.span);
  });
  std::sort(comments.begin(), comments.end(),
            [](const ByteSpan& a, const ByteSpan& b) { return a.start < b.start; });
  std::string out;
  out.reserve(unit.text.size());
  std::uint32_t at = 0;
  for (const ByteSpan& span : comments) {
    out.append(unit.text, at, span.start - at);
    out.push_back(' ');
    at = span.end;
  }
  out.append(unit.text, at, unit.text.size() - at);
  return SourceUnit{std::move(out), unit.language};
}

std::string to_plain_code(const SyntaxNode& node, const SourceUnit& unit) {
  if (node.span.end < node.span.start || node.span.end > unit.text.size()) {
    throw SpanOutOfRange("node span [" + std::to_string(node.span.start) + ", " +
                         std::to_string(node.span.end) +
                         ") exceeds text of size " +
                         std::to_string(unit.text.size()));
  }
  return unit.text.substr(node.span.start, node.span.size());
}

void walk(const SyntaxNode& root,
          const std::function<void(const SyntaxNode&)>& fn) {
  fn(root);
  for (const SyntaxNode& c : root.children) walk(c, fn);
}

const SyntaxNode* find_first(
    const SyntaxNode& root, const std::function<bool(const SyntaxNode&)>& pred) {
  if (pred(root)) return &root;
  for (const SyntaxNode& c : root.children) {
    if (const SyntaxNode* hit = find_first(c, pred)) return hit;
  }
  return nullptr;
}

std::vector<const SyntaxNode*> path_to(const SyntaxNode& root,
                                       const SyntaxNode& target) {
  if (&root == &target) return {&root};
  for (const SyntaxNode& c : root.children) {
    std::vector<const SyntaxNode*> sub = path_to(c, target);
    if (!sub.empty()) {
      sub.insert(sub.begin(), &root);
      return sub;
    }
  }
  return {};
}

KindTaxonomy::KindTaxonomy(const std::string& json_text) {
  auto parsed = nlohmann::json::parse(json_text);
  for (const auto& k : parsed.at("statement_kinds")) {
    statements_.push_back(k.get<std::string>());
  }
  for (const auto& k : parsed.at("expression_kinds")) {
    expressions_.push_back(k.get<std::string>());
  }
  known_ = statements_;
  known_.insert(known_.end(), expressions_.begin(), expressions_.end());
  if (parsed.contains("other_kinds")) {
    for (const auto& k : parsed.at("other_kinds")) {
      known_.push_back(k.get<std::string>());
    }
  }
}

const KindTaxonomy& KindTaxonomy::builtin() {
  static const KindTaxonomy taxonomy(data::kind_taxonomy_json());
  return taxonomy;
}

bool KindTaxonomy::is_expression(const std::string& kind) const {
  return std::find(expressions_.begin(), expressions_.end(), kind) !=
         expressions_.end();
}

bool KindTaxonomy::is_statement(const std::string& kind) const {
  return std::find(statements_.begin(), statements_.end(), kind) !=
         statements_.end();
}

bool is_subtype_of(const std::string& kind, const std::string& category) {
  const KindTaxonomy& taxonomy = KindTaxonomy::builtin();
  const auto& known = taxonomy.known_kinds();
  if (std::find(known.begin(), known.end(), kind) == known.end()) {
    throw UnknownKind("unknown node kind: " + kind);
  }
  if (category == "expression") return taxonomy.is_expression(kind);
  if (category == "statement") return taxonomy.is_statement(kind);
  throw UnknownKind("unknown category: " + category);
}

}  // namespace spvr
