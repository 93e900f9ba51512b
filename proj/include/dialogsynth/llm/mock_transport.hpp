#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialogsynth/llm/transport.hpp"

namespace dialogsynth::llm {

/// Scripted backend for tests and offline runs.
///
/// A reply is chosen, in order of precedence, by: the global call index,
/// the prompt hash, a custom handler, the first substring rule whose
/// substrings all occur in the request's message text, then the FIFO queue.
/// A rule replays its replies in order and then keeps repeating the last one.
/// Unscripted requests get HTTP 400.
class MockTransport final : public Transport {
 public:
  struct Reply {
    int status = 200;
    std::string body;
    std::chrono::milliseconds delay{0};
  };

  struct Request {
    std::size_t index = 0;
    std::string path;
    std::string body;
    std::string prompt_hash;
    /// Concatenated message contents (chat) or inputs (embeddings).
    std::string text;
  };

  using Handler = std::function<std::optional<Reply>(const Request&)>;

  /// Chat completion body carrying `content`.
  static Reply chat(std::string content);
  /// Embeddings body with one vector per input, in order.
  static Reply embeddings(const std::vector<std::vector<double>>& vectors);
  static Reply failure(int status, std::string body = "scripted failure");

  /// Loads a JSON script: {"queue": [reply...], "calls": {"0": reply},
  /// "prompt_hashes": {"<hex>": reply}, "rules": [{"match": [..], "replies": [reply...]}]}
  /// where reply is {"content": text} | {"status": n, "body": text} and may carry "delay_ms".
  static std::shared_ptr<MockTransport> from_script(const nlohmann::json& script);
  void load_script(const nlohmann::json& script);

  void enqueue(Reply reply);
  void on_call(std::size_t index, Reply reply);
  void on_prompt_hash(std::string hash, Reply reply);
  void when_contains(std::vector<std::string> substrings, std::vector<Reply> replies);
  void set_handler(Handler handler);

  HttpResponse post(const std::string& path, const std::string& body, const Headers& headers) override;

  std::size_t calls() const;
  std::vector<Request> requests() const;
  std::size_t max_concurrency() const;

 private:
  struct Rule {
    std::vector<std::string> substrings;
    std::vector<Reply> replies;
    std::size_t next = 0;
  };

  mutable std::mutex mutex_;
  std::deque<Reply> queue_;
  std::map<std::size_t, Reply> by_call_;
  std::map<std::string, Reply> by_hash_;
  std::vector<Rule> rules_;
  Handler handler_;
  std::vector<Request> log_;
  std::size_t in_flight_ = 0;
  std::size_t max_in_flight_ = 0;
};

}  // namespace dialogsynth::llm
