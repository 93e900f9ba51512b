#include "dialogsynth/corpus/tagged_block.hpp"

#include <string>

namespace dialogsynth::corpus {

std::optional<TaggedBlock> find_tagged_block(std::string_view text, std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  const std::size_t o = text.find(open);
  if (o == std::string_view::npos) return std::nullopt;
  const std::size_t start = o + open.size();
  const std::size_t c = text.find(close, start);
  if (c == std::string_view::npos) return std::nullopt;
  return TaggedBlock{text.substr(start, c - start), o, c};
}

}  // namespace dialogsynth::corpus
