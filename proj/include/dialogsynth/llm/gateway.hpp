#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialogsynth/llm/transport.hpp"

namespace dialogsynth::llm {

struct Message {
  std::string role;
  std::string content;

  bool operator==(const Message&) const = default;
};

struct Decoding {
  double temperature = 0.7;
  int max_tokens = 4096;
};

struct ChatRequest {
  std::string system;
  std::string user;
  /// Further turns after the first user message (e.g. checker feedback).
  std::vector<Message> follow_up;
  Decoding decoding;
  /// Overrides the backend's model when non-empty.
  std::string model_id;

  /// Throws PreconditionError for an empty user message or bad decoding values.
  void validate() const;
  std::vector<Message> messages() const;
};

/// Stable hex digest of a message list, used to key scripted replies and logs.
std::string prompt_hash(const std::vector<Message>& messages);
std::string prompt_hash(const std::vector<std::string>& inputs);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_backoff{500};
};

struct BackendConfig {
  std::string endpoint;
  std::optional<std::string> token;
  std::string model_id;
  std::size_t max_in_flight = 4;
  RetryPolicy retry;
  std::string chat_path = "/chat/completions";
  std::string embeddings_path = "/embeddings";
  /// Inputs per embeddings request.
  std::size_t embed_batch = 64;
  std::chrono::milliseconds timeout{120000};

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
  /// Applies `<prefix>_ENDPOINT`, `<prefix>_TOKEN` and `<prefix>_MODEL` when set.
  void apply_env(std::string_view prefix);
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string chat(const ChatRequest& request) = 0;
};

class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

struct GatewayStats {
  std::size_t requests = 0;
  std::size_t attempts = 0;
  std::size_t retries = 0;
  std::size_t failures = 0;
};

/// Chat and embedding client over a transport with bounded concurrency and
/// exponential-backoff retries on 408, 429, 5xx and transport errors.
class Gateway final : public ChatClient, public EmbeddingClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  Gateway(BackendConfig config, std::shared_ptr<Transport> transport, Sleeper sleeper = {});

  /// Throws BackendError after exhausting retries, RequestError on other 4xx,
  /// ContractError when a successful response lacks a completion.
  std::string chat(const ChatRequest& request) override;

  /// Vectors in input order. Throws PreconditionError for an empty input and
  /// ContractError for missing or mixed-dimension vectors.
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

  GatewayStats stats() const;
  const BackendConfig& config() const noexcept { return config_; }

 private:
  std::string post_with_retry(const std::string& path, const nlohmann::json& body);
  std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts);

  BackendConfig config_;
  std::shared_ptr<Transport> transport_;
  Sleeper sleeper_;
  std::counting_semaphore<> slots_;
  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> attempts_{0};
  std::atomic<std::size_t> retries_{0};
  std::atomic<std::size_t> failures_{0};
};

/// Gateway over HttpTransport for `config.endpoint`.
std::shared_ptr<Gateway> make_http_gateway(const BackendConfig& config);

}  // namespace dialogsynth::llm
