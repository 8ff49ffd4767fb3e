#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spvr {

enum class Language { kC, kCpp };

// A piece of source text plus the language it should be parsed as. The byte
// offsets used throughout the library always refer to `text`.
struct SourceUnit {
  std::string text;
  Language language = Language::kC;
};

// Half-open byte range [start, end) into a SourceUnit's text. Zero-width
// ranges (start == end) are valid and mark insertion points.
struct ByteSpan {
  std::uint32_t start = 0;
  std::uint32_t end = 0;

  std::uint32_t size() const noexcept { return end - start; }
  bool operator==(const ByteSpan&) const = default;
};

// Byte offsets of the first character of each line, always starting with 0.
// Used to translate between byte offsets and 1-based line numbers.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text);

  // 1-based line number containing byte `offset` (offset == text size maps to
  // the last line).
  std::uint32_t line_of(std::uint32_t offset) const;

  // Byte offset of the first character of 1-based `line`.
  std::uint32_t line_start(std::uint32_t line) const;

  // Byte offset one past the end of 1-based `line`, excluding the newline.
  std::uint32_t line_end(std::uint32_t line) const;

  std::uint32_t line_count() const noexcept {
    return static_cast<std::uint32_t>(starts_.size());
  }

 private:
  std::vector<std::uint32_t> starts_;
  std::uint32_t text_size_ = 0;
  const std::string* text_ = nullptr;
};

// Splits text into lines without their terminators. A trailing newline does
// not produce an extra empty line; an empty string yields one empty line.
std::vector<std::string> split_lines(const std::string& text);

}  // namespace spvr
