#pragma once

// Internal interface between the recursive-descent parser and the public
// parse() entry point in syntax.cpp.

#include <memory>
#include <string>

#include "spvr/syntax.hpp"

namespace spvr::internal {

struct ParseAttempt {
  std::unique_ptr<SyntaxNode> root;  // translation_unit over the given text
  int error_nodes = 0;
};

// Parses `text` as a translation unit. Statement-level error recovery turns
// unparseable stretches into ERROR nodes; this never throws.
ParseAttempt parse_translation_unit(const std::string& text);

}  // namespace spvr::internal
