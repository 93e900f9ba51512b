#include "dialogsynth/llm/gateway.hpp"

#include <cstdlib>
#include <thread>

#include <spdlog/spdlog.h>

#include "dialogsynth/util/errors.hpp"
#include "dialogsynth/util/text.hpp"

namespace dialogsynth::llm {

using nlohmann::json;

void ChatRequest::validate() const {
  if (text::trim(user).empty()) throw PreconditionError("chat request needs a non-empty user message");
  if (!(decoding.temperature >= 0.0)) throw PreconditionError("temperature must be >= 0");
  if (decoding.max_tokens < 1) throw PreconditionError("max_tokens must be positive");
}

std::vector<Message> ChatRequest::messages() const {
  std::vector<Message> out;
  if (!system.empty()) out.push_back({"system", system});
  out.push_back({"user", user});
  out.insert(out.end(), follow_up.begin(), follow_up.end());
  return out;
}

std::string prompt_hash(const std::vector<Message>& messages) {
  std::string flat;
  for (const auto& m : messages) {
    flat.append(m.role).push_back('\x1f');
    flat.append(m.content).push_back('\x1e');
  }
  return text::hex64(text::fnv1a64(flat));
}

std::string prompt_hash(const std::vector<std::string>& inputs) {
  std::string flat;
  for (const auto& s : inputs) flat.append(s).push_back('\x1e');
  return text::hex64(text::fnv1a64(flat));
}

void BackendConfig::validate() const {
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
  if (retry.base_backoff.count() < 0) throw ConfigError("retry.base_backoff must not be negative");
  if (embed_batch < 1) throw ConfigError("embed_batch must be >= 1");
}

void BackendConfig::apply_env(std::string_view prefix) {
  auto get = [&](const char* suffix) -> std::optional<std::string> {
    const std::string name = std::string(prefix) + "_" + suffix;
    const char* v = std::getenv(name.c_str());
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = get("ENDPOINT")) endpoint = *v;
  if (auto v = get("TOKEN")) token = *v;
  if (auto v = get("MODEL")) model_id = *v;
}

namespace {

bool retryable(int status) { return status == 0 || status == 408 || status == 429 || status >= 500; }

}  // namespace

Gateway::Gateway(BackendConfig config, std::shared_ptr<Transport> transport, Sleeper sleeper)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
      slots_(static_cast<std::ptrdiff_t>(config_.max_in_flight)) {
  config_.validate();
  if (!transport_) throw ConfigError("gateway needs a transport");
}

std::string Gateway::post_with_retry(const std::string& path, const json& body) {
  ++requests_;
  Headers headers = {{"Content-Type", "application/json"}};
  if (config_.token && !config_.token->empty()) headers.emplace_back("Authorization", "Bearer " + *config_.token);
  const std::string payload = body.dump();
  HttpResponse last;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    ++attempts_;
    slots_.acquire();
    try {
      last = transport_->post(path, payload, headers);
    } catch (...) {
      slots_.release();
      throw;
    }
    slots_.release();
    if (last.status >= 200 && last.status < 300) return last.body;
    if (!retryable(last.status)) {
      ++failures_;
      throw RequestError("backend rejected request to " + path + " with HTTP " + std::to_string(last.status) + ": " +
                             last.body.substr(0, 300),
                         last.status);
    }
    spdlog::debug("{} attempt {}/{} failed ({})", path, attempt, config_.retry.max_attempts,
                  last.status == 0 ? last.error : std::to_string(last.status));
    if (attempt < config_.retry.max_attempts) {
      ++retries_;
      sleeper_(config_.retry.base_backoff * (1LL << std::min(attempt - 1, 20)));
    }
  }
  ++failures_;
  const std::string reason = last.status == 0 ? "unreachable (" + last.error + ")" : "HTTP " + std::to_string(last.status);
  throw BackendError("backend " + path + " failed after " + std::to_string(config_.retry.max_attempts) +
                         " attempts: " + reason,
                     last.status, config_.retry.max_attempts);
}

std::string Gateway::chat(const ChatRequest& request) {
  request.validate();
  json messages = json::array();
  for (const auto& m : request.messages()) messages.push_back({{"role", m.role}, {"content", m.content}});
  json body = {{"model", request.model_id.empty() ? config_.model_id : request.model_id},
               {"messages", std::move(messages)},
               {"temperature", request.decoding.temperature},
               {"max_tokens", request.decoding.max_tokens}};
  const std::string raw = post_with_retry(config_.chat_path, body);
  try {
    const json doc = json::parse(raw);
    const json& content = doc.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw ContractError("chat completion content is not a string");
    return content.get<std::string>();
  } catch (const json::exception& e) {
    throw ContractError(std::string("malformed chat completion: ") + e.what());
  }
}

std::vector<std::vector<double>> Gateway::embed_batch(const std::vector<std::string>& texts) {
  json body = {{"model", config_.model_id}, {"input", texts}};
  const std::string raw = post_with_retry(config_.embeddings_path, body);
  std::vector<std::vector<double>> out(texts.size());
  std::vector<bool> seen(texts.size(), false);
  try {
    const json doc = json::parse(raw);
    const json& data = doc.at("data");
    if (!data.is_array() || data.size() != texts.size()) {
      throw ContractError("embeddings response has " + std::to_string(data.is_array() ? data.size() : 0) +
                          " entries for " + std::to_string(texts.size()) + " inputs");
    }
    for (std::size_t k = 0; k < data.size(); ++k) {
      const std::size_t index = data[k].contains("index") ? data[k].at("index").get<std::size_t>() : k;
      if (index >= texts.size() || seen[index]) throw ContractError("embeddings response has a bad index");
      seen[index] = true;
      out[index] = data[k].at("embedding").get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw ContractError(std::string("malformed embeddings response: ") + e.what());
  }
  return out;
}

std::vector<std::vector<double>> Gateway::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw PreconditionError("embed needs at least one text");
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += config_.embed_batch) {
    const std::size_t end = std::min(texts.size(), start + config_.embed_batch);
    auto part = embed_batch(std::vector<std::string>(texts.begin() + start, texts.begin() + end));
    for (auto& v : part) out.push_back(std::move(v));
  }
  const std::size_t dim = out.front().size();
  if (dim == 0) throw ContractError("embedding backend returned empty vectors");
  for (const auto& v : out) {
    if (v.size() != dim) throw ContractError("embedding backend returned vectors of different dimensions");
  }
  return out;
}

GatewayStats Gateway::stats() const { return {requests_.load(), attempts_.load(), retries_.load(), failures_.load()}; }

std::shared_ptr<Gateway> make_http_gateway(const BackendConfig& config) {
  return std::make_shared<Gateway>(config, std::make_shared<HttpTransport>(config.endpoint, config.timeout));
}

}  // namespace dialogsynth::llm
