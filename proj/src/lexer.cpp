#include "spvr/lexer.hpp"

#include <array>
#include <cctype>
#include <string_view>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "spvr/data.hpp"

namespace spvr {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

bool is_hex_digit(char c) {
  return std::isxdigit(static_cast<unsigned char>(c));
}

// Multi-character operators, longest first so greedy matching works.
constexpr std::array<std::string_view, 24> kMultiPunct = {
    "<<=", ">>=", "->*", "...", "::", "->", "++", "--", "<<", ">>",
    "<=",  ">=",  "==",  "!=",  "&&", "||", "+=", "-=", "*=", "/=",
    "%=",  "&=",  "|=",  "^=",
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  LexResult run() {
    LexResult out;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        at_line_start_ = true;
        ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        continue;
      }
      std::uint32_t start = pos_;
      if (c == '/' && peek(1) == '/') {
        skip_line_comment();
        out.trivia.push_back({TokenKind::kComment, start, pos_});
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        skip_block_comment();
        out.trivia.push_back({TokenKind::kComment, start, pos_});
        continue;
      }
      if (c == '#' && at_line_start_) {
        skip_preproc();
        out.trivia.push_back({TokenKind::kPreproc, start, pos_});
        continue;
      }
      at_line_start_ = false;
      if (is_ident_start(c)) {
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        out.tokens.push_back({TokenKind::kIdentifier, start, pos_});
        continue;
      }
      if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
        lex_number();
        out.tokens.push_back({TokenKind::kNumber, start, pos_});
        continue;
      }
      if (c == '"') {
        lex_quoted('"');
        out.tokens.push_back({TokenKind::kString, start, pos_});
        continue;
      }
      if (c == '\'') {
        lex_quoted('\'');
        out.tokens.push_back({TokenKind::kChar, start, pos_});
        continue;
      }
      lex_punct();
      out.tokens.push_back({TokenKind::kPunct, start, pos_});
    }
    return out;
  }

 private:
  char peek(std::uint32_t ahead) const {
    std::uint64_t at = static_cast<std::uint64_t>(pos_) + ahead;
    return at < text_.size() ? text_[at] : '\0';
  }

  void skip_line_comment() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  void skip_block_comment() {
    pos_ += 2;
    while (pos_ < text_.size()) {
      if (text_[pos_] == '*' && peek(1) == '/') {
        pos_ += 2;
        return;
      }
      ++pos_;
    }
  }

  void skip_preproc() {
    while (pos_ < text_.size() && text_[pos_] != '\n') {
      if (text_[pos_] == '\\' && peek(1) == '\n') pos_ += 2;
      else ++pos_;
    }
  }

  void lex_number() {
    bool hex = false;
    if (text_[pos_] == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      hex = true;
      pos_ += 2;
    }
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (hex ? is_hex_digit(c) : is_digit(c)) {
        ++pos_;
      } else if (c == '.') {
        ++pos_;
      } else if (!hex && (c == 'e' || c == 'E') &&
                 (is_digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') &&
                                        is_digit(peek(2))))) {
        pos_ += peek(1) == '+' || peek(1) == '-' ? 2 : 1;
      } else if (hex && (c == 'p' || c == 'P') &&
                 (is_digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') &&
                                        is_digit(peek(2))))) {
        pos_ += peek(1) == '+' || peek(1) == '-' ? 2 : 1;
      } else {
        break;
      }
    }
    while (pos_ < text_.size() &&
           (text_[pos_] == 'u' || text_[pos_] == 'U' || text_[pos_] == 'l' ||
            text_[pos_] == 'L' || text_[pos_] == 'f' || text_[pos_] == 'F')) {
      ++pos_;
    }
  }

  // Consumes a string or character literal. An unterminated literal is closed
  // at end of line so lexing never fails.
  void lex_quoted(char quote) {
    ++pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\\' && pos_ + 1 < text_.size()) {
        pos_ += 2;
        continue;
      }
      if (c == quote) {
        ++pos_;
        return;
      }
      if (c == '\n') return;
      ++pos_;
    }
  }

  void lex_punct() {
    std::string_view rest(text_.data() + pos_, text_.size() - pos_);
    for (std::string_view op : kMultiPunct) {
      if (rest.substr(0, op.size()) == op) {
        pos_ += static_cast<std::uint32_t>(op.size());
        return;
      }
    }
    ++pos_;
  }

  const std::string& text_;
  std::uint32_t pos_ = 0;
  bool at_line_start_ = true;
};

}  // namespace

LexResult lex(const std::string& text) { return Lexer(text).run(); }

std::vector<std::string> code_tokens(const std::string& text) {
  LexResult lexed = lex(text);
  std::vector<std::string> out;
  out.reserve(lexed.tokens.size());
  for (const Token& t : lexed.tokens) {
    out.push_back(text.substr(t.start, t.end - t.start));
  }
  return out;
}

bool is_cpp_keyword(const std::string& word) {
  static const std::unordered_set<std::string> keywords = [] {
    auto parsed = nlohmann::json::parse(data::cpp_keywords_json());
    std::unordered_set<std::string> set;
    for (const auto& k : parsed.at("keywords")) {
      set.insert(k.get<std::string>());
    }
    return set;
  }();
  return keywords.count(word) > 0;
}

}  // namespace spvr
