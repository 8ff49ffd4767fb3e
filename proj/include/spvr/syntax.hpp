#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "spvr/source.hpp"

namespace spvr {

// One node of a concrete syntax tree. Kinds follow the naming used by the
// common incremental C grammars ("if_statement", "call_expression", ...).
// Anonymous nodes are the grammar's literal tokens; their kind is the token
// text itself ("if", "(", "<=", ...).
struct SyntaxNode {
  std::string kind;
  ByteSpan span;
  std::uint32_t start_line = 0;  // 1-based, inclusive
  std::uint32_t end_line = 0;    // 1-based, inclusive
  bool named = true;
  std::vector<SyntaxNode> children;

  bool is_leaf() const noexcept { return children.empty(); }

  // True iff `s` lies entirely within this node's span. Zero-width spans at
  // either boundary count as contained.
  bool contains(const ByteSpan& s) const noexcept {
    return s.start >= span.start && s.end <= span.end;
  }
};

// A parsed source unit. Owns both the text and the node storage, so node
// pointers stay valid for the lifetime of the tree (moves included).
class SyntaxTree {
 public:
  SyntaxTree(SourceUnit unit, std::unique_ptr<SyntaxNode> root, bool degraded,
             bool wrapped)
      : unit_(std::move(unit)),
        root_(std::move(root)),
        degraded_(degraded),
        wrapped_(wrapped) {}

  const SyntaxNode& root() const noexcept { return *root_; }
  const SourceUnit& unit() const noexcept { return unit_; }

  // True when error recovery produced ERROR nodes somewhere in the tree.
  bool degraded() const noexcept { return degraded_; }

  // True when the text only parsed as a statement/expression fragment and was
  // parsed inside a synthetic wrapper (spans are rebased to the original
  // text either way).
  bool wrapped() const noexcept { return wrapped_; }

 private:
  SourceUnit unit_;
  std::unique_ptr<SyntaxNode> root_;
  bool degraded_ = false;
  bool wrapped_ = false;
};

// Parses a unit into a concrete syntax tree whose root spans the whole text.
// Fragments (a bare statement or expression) are accepted. Throws
// ParseFailure when the text is effectively empty or nothing parses.
SyntaxTree parse(const SourceUnit& unit);

// Returns a copy of `unit` with every comment replaced by a single space.
// Idempotent. Throws ParseFailure when `unit` is not parseable.
SourceUnit strip_comments(const SourceUnit& unit);

// The exact source slice covered by `node`. Throws SpanOutOfRange when the
// node's span does not lie within `unit.text`.
std::string to_plain_code(const SyntaxNode& node, const SourceUnit& unit);

// Pre-order walk over `root` and all descendants (anonymous nodes included).
void walk(const SyntaxNode& root,
          const std::function<void(const SyntaxNode&)>& fn);

// First node in pre-order satisfying `pred`, or nullptr.
const SyntaxNode* find_first(const SyntaxNode& root,
                             const std::function<bool(const SyntaxNode&)>& pred);

// Ancestor chain from `root` down to `target` inclusive; empty when `target`
// is not in the tree. Comparison is by node identity (address).
std::vector<const SyntaxNode*> path_to(const SyntaxNode& root,
                                       const SyntaxNode& target);

// The node-kind taxonomy that decides which kinds may root a minimum edit
// tree. Backed by a versioned JSON data file compiled into the library.
class KindTaxonomy {
 public:
  // The shipped taxonomy.
  static const KindTaxonomy& builtin();

  // Construct from the JSON text of a taxonomy file.
  explicit KindTaxonomy(const std::string& json_text);

  // True if `kind` is a subtype of "expression" / "statement". Unlike
  // is_subtype_of these never throw; unknown kinds are simply neither.
  bool is_expression(const std::string& kind) const;
  bool is_statement(const std::string& kind) const;

  // True if `kind` qualifies to root a minimum edit tree.
  bool qualifies(const std::string& kind) const {
    return is_expression(kind) || is_statement(kind);
  }

  // All kinds the taxonomy knows about.
  const std::vector<std::string>& known_kinds() const { return known_; }

 private:
  std::vector<std::string> known_;
  std::vector<std::string> statements_;
  std::vector<std::string> expressions_;
};

// True if `kind` belongs to `category` ("expression" or "statement") in the
// shipped taxonomy. Throws UnknownKind for a kind the taxonomy has never
// heard of, and for an unknown category.
bool is_subtype_of(const std::string& kind, const std::string& category);

}  // namespace spvr
