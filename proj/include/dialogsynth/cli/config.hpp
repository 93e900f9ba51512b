#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dialogsynth/agents/pipeline.hpp"
#include "dialogsynth/concepts/embedder.hpp"
#include "dialogsynth/llm/gateway.hpp"

namespace dialogsynth::cli {

enum class BackendKind { http, mock };

struct BackendSpec {
  BackendKind kind = BackendKind::http;
  llm::BackendConfig config;
  /// Mock only: JSON script file.
  std::filesystem::path script;
  double temperature = 0.7;
  int max_tokens = 4096;
};

enum class EmbedderKind { none, hashed, http, mock };

struct EmbedderSpec {
  EmbedderKind kind = EmbedderKind::hashed;
  std::size_t dim = 512;
  std::size_t ngram = 3;
  BackendSpec backend;
};

/// Everything a run needs. Relative paths resolve against the config file.
struct RunConfig {
  std::optional<BackendSpec> generator;
  std::optional<BackendSpec> judge;
  EmbedderSpec embedder;
  std::filesystem::path ontology;
  std::filesystem::path lexicon;
  std::filesystem::path allowed_tags;
  std::filesystem::path rules;
  std::vector<std::filesystem::path> exemplars;
  std::filesystem::path prompts_dir;
  std::filesystem::path labels;
  agents::LoopConfig loop;
  double similarity_threshold = 0.8;
  bool strict_micro_intents = false;
  std::size_t workers = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError for a bad value and IoError for a missing path.
  void validate() const;
  /// DIALOGSYNTH_{GENERATOR,JUDGE,EMBEDDER}_{ENDPOINT,TOKEN,MODEL}.
  void apply_env();
};

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& yaml, const std::filesystem::path& base_dir);

/// Live services built from a RunConfig; owns everything AgentDeps points to.
class Services {
 public:
  explicit Services(const RunConfig& config);

  /// Throws ConfigError when no generator backend is configured.
  agents::AgentDeps agent_deps() const;
  /// Throws ConfigError when no judge backend is configured.
  llm::ChatClient& judge() const;
  const agents::PromptLibrary& prompts() const { return *prompts_; }
  const corpus::TopicOntology& ontology() const { return *ontology_; }
  const extract::Lexicon& lexicon() const { return *lexicon_; }
  const corpus::LabelUniverse& labels() const { return *labels_; }
  const std::string& rules() const { return rules_; }
  const std::string& exemplars() const { return exemplars_; }
  concepts::Embedder* embedder() const { return embedder_.get(); }
  const RunConfig& config() const { return config_; }
  double generator_temperature() const;

 private:
  RunConfig config_;
  std::unique_ptr<agents::PromptLibrary> prompts_;
  std::unique_ptr<corpus::TopicOntology> ontology_;
  std::unique_ptr<extract::Lexicon> lexicon_;
  std::unique_ptr<corpus::LabelUniverse> labels_;
  std::string rules_;
  std::string exemplars_;
  std::shared_ptr<llm::Gateway> generator_;
  std::shared_ptr<llm::Gateway> judge_;
  std::shared_ptr<llm::Gateway> embed_gateway_;
  std::unique_ptr<concepts::Embedder> embedder_;
};

}  // namespace dialogsynth::cli
