#include "spvr/source.hpp"

#include <algorithm>

namespace spvr {

LineIndex::LineIndex(const std::string& text)
    : text_size_(static_cast<std::uint32_t>(text.size())), text_(&text) {
  starts_.push_back(0);
  // A '\n' at the very end closes the last line without opening a new one,
  // matching split_lines.
  for (std::uint32_t i = 0; i + 1 < text.size(); ++i) {
    if (text[i] == '\n') starts_.push_back(i + 1);
  }
}

std::uint32_t LineIndex::line_of(std::uint32_t offset) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
  return static_cast<std::uint32_t>(it - starts_.begin());
}

std::uint32_t LineIndex::line_start(std::uint32_t line) const {
  return starts_.at(line - 1);
}

std::uint32_t LineIndex::line_end(std::uint32_t line) const {
  std::uint32_t end = line < starts_.size() ? starts_[line] : text_size_;
  const std::string& text = *text_;
  while (end > starts_[line - 1] &&
         (text[end - 1] == '\n' || text[end - 1] == '\r')) {
    --end;
  }
  return end;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      if (!current.empty() && current.back() == '\r') current.pop_back();
      lines.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (text.empty() || text.back() != '\n') lines.push_back(std::move(current));
  return lines;
}

}  // namespace spvr
