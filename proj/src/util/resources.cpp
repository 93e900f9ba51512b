#include "dialogsynth/util/resources.hpp"

#include "dialogsynth/util/errors.hpp"

namespace dialogsynth::resources {

std::optional<std::string_view> find(std::string_view key) {
  for (const auto& [k, v] : detail::table()) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string_view get(std::string_view key) {
  if (auto v = find(key)) return *v;
  throw ConfigError("no bundled resource named '" + std::string(key) + "'");
}

std::vector<std::string_view> keys() {
  std::vector<std::string_view> out;
  for (const auto& entry : detail::table()) out.push_back(entry.first);
  return out;
}

}  // namespace dialogsynth::resources
