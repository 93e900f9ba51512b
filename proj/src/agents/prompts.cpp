#include "dialogsynth/agents/prompts.hpp"

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/io.hpp"
#include "dialogsynth/util/resources.hpp"

namespace dialogsynth::agents {

std::string render_template(std::string_view tmpl, const TemplateValues& values) {
  std::string out;
  out.reserve(tmpl.size());
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    const char c = tmpl[i];
    if (c == '{' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
      out.push_back('{');
      ++i;
      continue;
    }
    if (c == '}' && i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
      out.push_back('}');
      ++i;
      continue;
    }
    if (c == '{') {
      const std::size_t close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(tmpl.substr(i + 1, close - i - 1));
        if (it != values.end()) {
          out.append(it->second);
          i = close;
          continue;
        }
      }
    }
    out.push_back(c);
  }
  return out;
}

namespace {

constexpr std::string_view kPrefix = "prompts/";
constexpr std::string_view kSuffix = ".txt";

}  // namespace

PromptLibrary PromptLibrary::bundled() {
  PromptLibrary lib;
  for (std::string_view key : resources::keys()) {
    if (key.substr(0, kPrefix.size()) != kPrefix || key.size() < kPrefix.size() + kSuffix.size()) continue;
    if (key.substr(key.size() - kSuffix.size()) != kSuffix) continue;
    std::string name(key.substr(kPrefix.size(), key.size() - kPrefix.size() - kSuffix.size()));
    lib.templates_[name] = std::string(resources::get(key));
  }
  return lib;
}

PromptLibrary PromptLibrary::with_overrides(const std::filesystem::path& directory) {
  PromptLibrary lib = bundled();
  if (!std::filesystem::is_directory(directory)) throw ConfigError("prompt directory not found: " + directory.string());
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (!entry.is_regular_file() || entry.path().extension() != kSuffix) continue;
    lib.templates_[entry.path().stem().string()] = io::read_file(entry.path());
  }
  return lib;
}

const std::string& PromptLibrary::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw ConfigError("unknown prompt template: " + std::string(name));
  return it->second;
}

std::string PromptLibrary::render(std::string_view name, const TemplateValues& values) const {
  return render_template(get(name), values);
}

}  // namespace dialogsynth::agents
