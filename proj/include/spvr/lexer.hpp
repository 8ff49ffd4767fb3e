#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spvr/source.hpp"

namespace spvr {

enum class TokenKind {
  kIdentifier,
  kNumber,
  kString,
  kChar,
  kPunct,
  kComment,
  kPreproc,
};

struct Token {
  TokenKind kind;
  std::uint32_t start = 0;
  std::uint32_t end = 0;

  ByteSpan span() const noexcept { return {start, end}; }
};

struct LexResult {
  std::vector<Token> tokens;  // code tokens, in order, trivia excluded
  std::vector<Token> trivia;  // comments and preprocessor lines, in order
};

// Tokenizes C/C++ source. Never throws: unterminated strings or stray bytes
// are closed at end of line / emitted as single-character punctuation.
LexResult lex(const std::string& text);

// The code-token texts of `text` (comments and preprocessor lines dropped),
// as used by the token-level similarity metrics.
std::vector<std::string> code_tokens(const std::string& text);

// True if `word` is a C/C++ keyword per the shipped keyword table.
bool is_cpp_keyword(const std::string& word);

}  // namespace spvr
