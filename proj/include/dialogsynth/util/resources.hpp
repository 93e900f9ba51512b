#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

/// Text resources compiled from data/ (prompt templates, default ontology,
/// starter lexicon, rubric texts). Keys are paths relative to data/.
namespace dialogsynth::resources {

std::optional<std::string_view> find(std::string_view key);

/// Throws ConfigError when the key is unknown.
std::string_view get(std::string_view key);

std::vector<std::string_view> keys();

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& table();
}

}  // namespace dialogsynth::resources
