#include "dialogsynth/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include "dialogsynth/llm/mock_transport.hpp"
#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/io.hpp"
#include "dialogsynth/util/resources.hpp"

namespace dialogsynth::cli {

namespace fs = std::filesystem;

namespace {

template <typename T>
T scalar(const YAML::Node& node, const std::string& path) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + path + "' has the wrong type");
  }
}

void reject_unknown(const YAML::Node& node, std::initializer_list<std::string_view> allowed, const std::string& path) {
  if (!node.IsMap()) throw ConfigError("config key '" + path + "' must be a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown config key '" + (path.empty() ? key : path + "." + key) + "'");
  }
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

BackendSpec parse_backend(const YAML::Node& node, const std::string& path, const fs::path& base) {
  reject_unknown(node,
                 {"kind", "endpoint", "token", "model", "max_in_flight", "max_attempts", "backoff_ms", "timeout_ms",
                  "chat_path", "embeddings_path", "embed_batch", "script", "temperature", "max_tokens"},
                 path);
  BackendSpec spec;
  if (node["kind"]) {
    const auto kind = scalar<std::string>(node["kind"], path + ".kind");
    if (kind == "http") {
      spec.kind = BackendKind::http;
    } else if (kind == "mock") {
      spec.kind = BackendKind::mock;
    } else {
      throw ConfigError("config key '" + path + ".kind' must be http or mock");
    }
  }
  auto& c = spec.config;
  if (node["endpoint"]) c.endpoint = scalar<std::string>(node["endpoint"], path + ".endpoint");
  if (node["token"]) c.token = scalar<std::string>(node["token"], path + ".token");
  if (node["model"]) c.model_id = scalar<std::string>(node["model"], path + ".model");
  if (node["max_in_flight"]) c.max_in_flight = scalar<std::size_t>(node["max_in_flight"], path + ".max_in_flight");
  if (node["max_attempts"]) c.retry.max_attempts = scalar<int>(node["max_attempts"], path + ".max_attempts");
  if (node["backoff_ms"]) {
    c.retry.base_backoff = std::chrono::milliseconds(scalar<long>(node["backoff_ms"], path + ".backoff_ms"));
  }
  if (node["timeout_ms"]) c.timeout = std::chrono::milliseconds(scalar<long>(node["timeout_ms"], path + ".timeout_ms"));
  if (node["chat_path"]) c.chat_path = scalar<std::string>(node["chat_path"], path + ".chat_path");
  if (node["embeddings_path"]) c.embeddings_path = scalar<std::string>(node["embeddings_path"], path + ".embeddings_path");
  if (node["embed_batch"]) c.embed_batch = scalar<std::size_t>(node["embed_batch"], path + ".embed_batch");
  if (node["script"]) spec.script = resolve(base, scalar<std::string>(node["script"], path + ".script"));
  if (node["temperature"]) spec.temperature = scalar<double>(node["temperature"], path + ".temperature");
  if (node["max_tokens"]) spec.max_tokens = scalar<int>(node["max_tokens"], path + ".max_tokens");
  return spec;
}

void validate_backend(const BackendSpec& spec, const std::string& name) {
  spec.config.validate();
  if (spec.kind == BackendKind::http && spec.config.endpoint.empty()) {
    throw ConfigError(name + " backend needs an endpoint (config or DIALOGSYNTH_" + name + "_ENDPOINT)");
  }
  if (spec.kind == BackendKind::mock) {
    if (spec.script.empty()) throw ConfigError(name + " mock backend needs a script");
    if (!fs::exists(spec.script)) throw IoError("mock script not found: " + spec.script.string());
  }
  if (!(spec.temperature >= 0.0)) throw ConfigError(name + " temperature must be >= 0");
  if (spec.max_tokens < 1) throw ConfigError(name + " max_tokens must be >= 1");
}

void require_file(const fs::path& p, const std::string& what) {
  if (!p.empty() && !fs::exists(p)) throw IoError(what + " not found: " + p.string());
}

std::shared_ptr<llm::Gateway> make_gateway(const BackendSpec& spec) {
  if (spec.kind == BackendKind::http) return llm::make_http_gateway(spec.config);
  nlohmann::json script;
  try {
    script = nlohmann::json::parse(io::read_file(spec.script));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("mock script " + spec.script.string() + " is not valid JSON: " + e.what());
  }
  return std::make_shared<llm::Gateway>(spec.config, llm::MockTransport::from_script(script),
                                        [](std::chrono::milliseconds) {});
}

}  // namespace

RunConfig parse_run_config(const std::string& yaml, const fs::path& base) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  RunConfig cfg;
  if (!root || root.IsNull()) return cfg;
  reject_unknown(root,
                 {"generator", "judge", "embedder", "ontology", "lexicon", "allowed_tags", "rules", "exemplars",
                  "prompts_dir", "labels", "loops", "similarity_threshold", "strict_micro_intents", "workers", "seed"},
                 "");
  if (root["generator"]) cfg.generator = parse_backend(root["generator"], "generator", base);
  if (root["judge"]) cfg.judge = parse_backend(root["judge"], "judge", base);
  if (const auto e = root["embedder"]) {
    reject_unknown(e, {"kind", "dim", "ngram", "backend"}, "embedder");
    if (e["kind"]) {
      const auto kind = scalar<std::string>(e["kind"], "embedder.kind");
      if (kind == "none") {
        cfg.embedder.kind = EmbedderKind::none;
      } else if (kind == "hashed") {
        cfg.embedder.kind = EmbedderKind::hashed;
      } else if (kind == "http") {
        cfg.embedder.kind = EmbedderKind::http;
      } else if (kind == "mock") {
        cfg.embedder.kind = EmbedderKind::mock;
      } else {
        throw ConfigError("config key 'embedder.kind' must be none, hashed, http or mock");
      }
    }
    if (e["dim"]) cfg.embedder.dim = scalar<std::size_t>(e["dim"], "embedder.dim");
    if (e["ngram"]) cfg.embedder.ngram = scalar<std::size_t>(e["ngram"], "embedder.ngram");
    if (e["backend"]) cfg.embedder.backend = parse_backend(e["backend"], "embedder.backend", base);
    if (cfg.embedder.kind == EmbedderKind::mock) cfg.embedder.backend.kind = BackendKind::mock;
  }
  auto path_of = [&](const char* key) { return resolve(base, scalar<std::string>(root[key], key)); };
  if (root["ontology"]) cfg.ontology = path_of("ontology");
  if (root["lexicon"]) cfg.lexicon = path_of("lexicon");
  if (root["allowed_tags"]) cfg.allowed_tags = path_of("allowed_tags");
  if (root["rules"]) cfg.rules = path_of("rules");
  if (root["prompts_dir"]) cfg.prompts_dir = path_of("prompts_dir");
  if (root["labels"]) cfg.labels = path_of("labels");
  if (const auto ex = root["exemplars"]) {
    if (!ex.IsSequence()) throw ConfigError("config key 'exemplars' must be a list");
    for (const auto& item : ex) cfg.exemplars.push_back(resolve(base, scalar<std::string>(item, "exemplars[]")));
  }
  if (const auto loops = root["loops"]) {
    reject_unknown(loops, {"plan", "generate", "refine"}, "loops");
    if (loops["plan"]) cfg.loop.max_plan_iterations = scalar<int>(loops["plan"], "loops.plan");
    if (loops["generate"]) cfg.loop.max_generate_iterations = scalar<int>(loops["generate"], "loops.generate");
    if (loops["refine"]) cfg.loop.max_refine_iterations = scalar<int>(loops["refine"], "loops.refine");
  }
  if (root["similarity_threshold"]) {
    cfg.similarity_threshold = scalar<double>(root["similarity_threshold"], "similarity_threshold");
  }
  if (root["strict_micro_intents"]) {
    cfg.strict_micro_intents = scalar<bool>(root["strict_micro_intents"], "strict_micro_intents");
  }
  if (root["workers"]) cfg.workers = scalar<std::size_t>(root["workers"], "workers");
  if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed");
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(io::read_file(path), path.parent_path());
}

void RunConfig::apply_env() {
  if (generator) generator->config.apply_env("DIALOGSYNTH_GENERATOR");
  if (judge) judge->config.apply_env("DIALOGSYNTH_JUDGE");
  embedder.backend.config.apply_env("DIALOGSYNTH_EMBEDDER");
}

void RunConfig::validate() const {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  loop.validate();
  concepts::MatchConfig{similarity_threshold}.validate();
  if (generator) validate_backend(*generator, "GENERATOR");
  if (judge) validate_backend(*judge, "JUDGE");
  if (embedder.kind == EmbedderKind::hashed && (embedder.dim < 1 || embedder.ngram < 1)) {
    throw ConfigError("embedder dim and ngram must be >= 1");
  }
  if (embedder.kind == EmbedderKind::http || embedder.kind == EmbedderKind::mock) {
    validate_backend(embedder.backend, "EMBEDDER");
  }
  if (lexicon.empty() != allowed_tags.empty()) throw ConfigError("lexicon and allowed_tags must be given together");
  require_file(ontology, "ontology");
  require_file(lexicon, "lexicon");
  require_file(allowed_tags, "allowed_tags");
  require_file(rules, "rules");
  require_file(labels, "labels");
  for (const auto& e : exemplars) require_file(e, "exemplar");
  if (!prompts_dir.empty() && !fs::is_directory(prompts_dir)) {
    throw IoError("prompts_dir is not a directory: " + prompts_dir.string());
  }
}

Services::Services(const RunConfig& config) : config_(config) {
  config_.validate();
  prompts_ = std::make_unique<agents::PromptLibrary>(config_.prompts_dir.empty()
                                                         ? agents::PromptLibrary::bundled()
                                                         : agents::PromptLibrary::with_overrides(config_.prompts_dir));
  ontology_ = std::make_unique<corpus::TopicOntology>(config_.ontology.empty()
                                                          ? corpus::TopicOntology::ems_default()
                                                          : corpus::load_topic_ontology(io::read_file(config_.ontology)));
  lexicon_ = std::make_unique<extract::Lexicon>(config_.lexicon.empty()
                                                    ? extract::Lexicon::ems_default()
                                                    : extract::Lexicon::load(config_.lexicon, config_.allowed_tags));
  labels_ = std::make_unique<corpus::LabelUniverse>(
      config_.labels.empty() ? corpus::LabelUniverse::open()
                             : corpus::LabelUniverse::parse(io::read_file(config_.labels)));
  rules_ = config_.rules.empty() ? std::string(resources::get("rules/ems_rules.txt")) : io::read_file(config_.rules);
  if (config_.exemplars.empty()) {
    exemplars_ = std::string(resources::get("exemplars/chest_pain_exemplar.txt"));
  } else {
    for (const auto& e : config_.exemplars) {
      if (!exemplars_.empty()) exemplars_ += "\n\n";
      exemplars_ += io::read_file(e);
    }
  }
  if (config_.generator) generator_ = make_gateway(*config_.generator);
  if (config_.judge) judge_ = make_gateway(*config_.judge);
  switch (config_.embedder.kind) {
    case EmbedderKind::none:
      break;
    case EmbedderKind::hashed:
      embedder_ = std::make_unique<concepts::HashedNgramEmbedder>(config_.embedder.dim, config_.embedder.ngram);
      break;
    case EmbedderKind::http:
    case EmbedderKind::mock: {
      embed_gateway_ = make_gateway(config_.embedder.backend);
      auto gateway = embed_gateway_;
      embedder_ = std::make_unique<concepts::FunctionEmbedder>(
          [gateway](const std::vector<std::string>& texts) { return gateway->embed(texts); });
      break;
    }
  }
}

agents::AgentDeps Services::agent_deps() const {
  if (!generator_) throw ConfigError("no generator backend configured");
  agents::AgentDeps deps;
  deps.chat = generator_.get();
  deps.embedder = embedder_.get();
  deps.ontology = ontology_.get();
  deps.lexicon = lexicon_.get();
  deps.prompts = prompts_.get();
  deps.rules = rules_;
  deps.exemplars = exemplars_;
  deps.loop = config_.loop;
  deps.match.similarity_threshold = config_.similarity_threshold;
  deps.flow_options.strict_micro_intents = config_.strict_micro_intents;
  deps.decoding = {config_.generator->temperature, config_.generator->max_tokens};
  deps.model_id = config_.generator->config.model_id;
  return deps;
}

llm::ChatClient& Services::judge() const {
  if (!judge_) throw ConfigError("no judge backend configured");
  return *judge_;
}

double Services::generator_temperature() const { return config_.generator ? config_.generator->temperature : 0.0; }

}  // namespace dialogsynth::cli
