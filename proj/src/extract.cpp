#include "spvr/extract.hpp"

#include <optional>
#include <vector>

#include "spvr/errors.hpp"
#include "spvr/syntax.hpp"

namespace spvr {

namespace {

// Body texts of ``` fenced blocks, in reply order. An optional language tag
// on the opening fence line is dropped; an unterminated fence runs to the
// end of the reply.
std::vector<std::string> fenced_blocks(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find("```", pos);
    if (open == std::string::npos) break;
    std::size_t body = text.find('\n', open + 3);
    if (body == std::string::npos) {
      // "```lang" with nothing after it: an empty block.
      out.emplace_back();
      break;
    }
    ++body;  // skip the newline after the fence line
    std::size_t close = text.find("```", body);
    if (close == std::string::npos) {
      out.push_back(text.substr(body));
      break;
    }
    std::size_t end = close;
    if (end > body && text[end - 1] == '\n') --end;  // drop the fence's newline
    out.push_back(text.substr(body, end - body));
    pos = close + 3;
  }
  return out;
}

// First node of the wanted kind in `code`, as its verbatim slice.
std::optional<std::string> first_of_kind(const std::string& code,
                                         const std::string& met_type) {
  if (code.find_first_not_of(" \t\r\n") == std::string::npos) {
    return std::nullopt;
  }
  try {
    SyntaxTree tree = parse(SourceUnit{code, Language::kC});
    const SyntaxNode* node = find_first(
        tree.root(), [&](const SyntaxNode& n) { return n.kind == met_type; });
    if (node == nullptr) return std::nullopt;
    return to_plain_code(*node, tree.unit());
  } catch (const ParseFailure&) {
    return std::nullopt;
  }
}

}  // namespace

std::string to_string(ExtractionStatus status) {
  switch (status) {
    case ExtractionStatus::kExact: return "exact";
    case ExtractionStatus::kFenceStripped: return "fence_stripped";
    case ExtractionStatus::kFailed: return "failed";
  }
  return "failed";
}

RepairCandidate extract_patch(const std::string& raw_reply,
                              const std::string& met_type) {
  RepairCandidate candidate;
  if (auto direct = first_of_kind(raw_reply, met_type)) {
    candidate.status = ExtractionStatus::kExact;
    candidate.code = *std::move(direct);
    return candidate;
  }
  for (const std::string& block : fenced_blocks(raw_reply)) {
    if (auto inner = first_of_kind(block, met_type)) {
      candidate.status = ExtractionStatus::kFenceStripped;
      candidate.code = *std::move(inner);
      return candidate;
    }
  }
  candidate.status = ExtractionStatus::kFailed;
  return candidate;
}

}  // namespace spvr
