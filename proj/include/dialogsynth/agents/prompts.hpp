#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace dialogsynth::agents {

using TemplateValues = std::map<std::string, std::string, std::less<>>;

/// Replaces `{name}` with values[name]. `{{` and `}}` produce literal braces;
/// a `{...}` whose name is not a known value is copied unchanged.
std::string render_template(std::string_view tmpl, const TemplateValues& values);

/// Prompt templates by name ("planner.system", "judge_logic.user", ...).
/// Starts from the bundled set; a directory can override individual files
/// named `<name>.txt`.
class PromptLibrary {
 public:
  static PromptLibrary bundled();
  static PromptLibrary with_overrides(const std::filesystem::path& directory);

  /// Throws ConfigError for an unknown name.
  const std::string& get(std::string_view name) const;
  std::string render(std::string_view name, const TemplateValues& values) const;

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

}  // namespace dialogsynth::agents
