#include "dialogsynth/util/io.hpp"

#include <fstream>
#include <sstream>

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move output into place at '" + path.string() + "': " + ec.message());
}

std::vector<NumberedLine> read_jsonl(const std::filesystem::path& path) {
  std::vector<NumberedLine> out;
  std::size_t n = 0;
  for (auto& line : text::split_lines(read_file(path))) {
    ++n;
    if (text::trim(line).empty()) continue;
    out.push_back({n, std::move(line)});
  }
  return out;
}

}  // namespace dialogsynth::io
