#include "dialogsynth/agents/style.hpp"

#include <cctype>

#include "dialogsynth/corpus/tagged_block.hpp"
#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::agents {

using nlohmann::json;

namespace {

/// Length of a leading "N." / "N)" list marker plus following blanks, or 0.
std::size_t list_marker(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0 || i >= line.size() || (line[i] != '.' && line[i] != ')')) return 0;
  ++i;
  if (i < line.size() && line[i] != ' ' && line[i] != '\t') return 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  return i;
}

std::vector<std::string> parse_critique_body(std::string_view body, std::string_view full, std::size_t body_offset) {
  std::vector<std::string> out;
  const std::string_view trimmed = text::trim(body);
  if (trimmed.empty()) return out;
  if (trimmed.front() == '[') {
    json arr;
    try {
      arr = json::parse(trimmed);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("critique JSON array is malformed: ") + e.what(), std::string(full),
                       body_offset + static_cast<std::size_t>(trimmed.data() - body.data()) + e.byte);
    }
    if (!arr.is_array()) throw ParseError("critique must be a list", std::string(full), body_offset);
    for (const auto& item : arr) {
      if (!item.is_string()) throw ParseError("critique entries must be strings", std::string(full), body_offset);
      auto t = text::trim(item.get<std::string>());
      if (!t.empty()) out.emplace_back(t);
    }
    return out;
  }
  std::size_t line_start = 0;
  bool numbered = false;
  while (line_start <= body.size()) {
    std::size_t nl = body.find('\n', line_start);
    std::string_view line = body.substr(line_start, nl == std::string_view::npos ? body.npos : nl - line_start);
    std::string_view t = text::trim(line);
    if (!t.empty()) {
      std::size_t marker = list_marker(t);
      std::size_t bullet = (t.size() > 1 && (t[0] == '-' || t[0] == '*') && (t[1] == ' ' || t[1] == '\t')) ? 2 : 0;
      if (marker > 0 || bullet > 0) {
        numbered = true;
        auto item = text::trim(t.substr(marker > 0 ? marker : bullet));
        out.emplace_back(item);
      } else if (numbered && !out.empty()) {
        out.back().append(" ").append(t);
      } else {
        out.emplace_back(t);
      }
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }
  std::erase_if(out, [](const std::string& s) { return s.empty(); });
  return out;
}

}  // namespace

StyleReport parse_style_response(std::string_view response) {
  const std::string full(response);
  auto approved = corpus::find_tagged_block(response, "approved");
  if (!approved) {
    const std::size_t at = response.find("<approved>");
    throw ParseError("missing <approved>...</approved> block", full,
                     at == std::string_view::npos ? response.size() : at);
  }
  const std::string_view token = text::trim(approved->content);
  StyleReport report;
  if (token == "true") {
    report.approved = true;
  } else if (token != "false") {
    throw ParseError("<approved> must contain true or false", full, approved->open_offset + 10);
  }
  auto critique = corpus::find_tagged_block(response, "critique");
  if (critique) {
    const std::size_t body_offset = critique->open_offset + 10;
    report.critiques = parse_critique_body(critique->content, response, body_offset);
  } else if (response.find("<critique>") != std::string_view::npos) {
    throw ParseError("unterminated <critique> block", full, response.find("<critique>"));
  }
  if (!report.approved && report.critiques.empty()) {
    throw ParseError("not approved but no critiques given", full, critique ? critique->open_offset : response.size());
  }
  return report;
}

std::string format_style_response(const StyleReport& report) {
  std::string out = report.approved ? "<approved>true</approved>\n<critique>\n" : "<approved>false</approved>\n<critique>\n";
  for (std::size_t i = 0; i < report.critiques.size(); ++i) {
    const std::string_view c = text::trim(report.critiques[i]);
    if (c.empty()) throw SerializationError("critique " + std::to_string(i + 1) + " is empty");
    if (c.find('\n') != std::string_view::npos) throw SerializationError("critiques must be single lines");
    if (c.find("</critique>") != std::string_view::npos || c.find("<critique>") != std::string_view::npos) {
      throw SerializationError("critique contains a block tag");
    }
    out += std::to_string(i + 1) + ". " + std::string(c) + "\n";
  }
  if (!report.approved && report.critiques.empty()) throw SerializationError("an unapproved report needs critiques");
  out += "</critique>\n";
  return out;
}

json to_json(const StyleReport& report) { return {{"approved", report.approved}, {"critiques", report.critiques}}; }

}  // namespace dialogsynth::agents
