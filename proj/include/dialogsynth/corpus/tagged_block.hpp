#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace dialogsynth::corpus {

/// Content between the first `<tag>` and the next `</tag>`.
struct TaggedBlock {
  std::string_view content;
  std::size_t open_offset = 0;   ///< offset of '<' of the opening tag
  std::size_t close_offset = 0;  ///< offset of '<' of the closing tag
};

/// `tag` is the bare name, e.g. "plan". Returns nullopt when either the
/// opening or the closing tag is absent.
std::optional<TaggedBlock> find_tagged_block(std::string_view text, std::string_view tag);

}  // namespace dialogsynth::corpus
