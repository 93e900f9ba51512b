#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dialogsynth::agents {

struct StyleReport {
  bool approved = false;
  std::vector<std::string> critiques;

  bool operator==(const StyleReport&) const = default;
};

/// Parses `<approved>true|false</approved>` and `<critique>...</critique>`.
/// The critique body may be a numbered list ("1. ...", "2) ...") or a JSON
/// array of strings; unnumbered lines continue the previous item. The
/// critique block may be omitted only when approved. Throws ParseError with
/// the offset of the first problem.
StyleReport parse_style_response(std::string_view response);

/// Canonical rendering accepted by parse_style_response. Throws
/// SerializationError for empty or multi-line critiques.
std::string format_style_response(const StyleReport& report);

nlohmann::json to_json(const StyleReport& report);

}  // namespace dialogsynth::agents
