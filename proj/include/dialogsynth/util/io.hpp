#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace dialogsynth::io {

/// Reads a whole file; throws IoError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes atomically enough for our purposes: temp file then rename.
void write_file(const std::filesystem::path& path, const std::string& content);

/// Non-empty lines of a newline-delimited file, paired with 1-based line numbers.
struct NumberedLine {
  std::size_t number;
  std::string text;
};
std::vector<NumberedLine> read_jsonl(const std::filesystem::path& path);

}  // namespace dialogsynth::io
