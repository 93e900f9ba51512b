#include "dialogsynth/llm/mock_transport.hpp"

#include <algorithm>
#include <thread>

#include "dialogsynth/llm/gateway.hpp"
#include "dialogsynth/util/errors.hpp"

namespace dialogsynth::llm {

using nlohmann::json;

MockTransport::Reply MockTransport::chat(std::string content) {
  json body = {{"choices", json::array({{{"index", 0}, {"message", {{"role", "assistant"}, {"content", std::move(content)}}}}})}};
  return {200, body.dump(), {}};
}

MockTransport::Reply MockTransport::embeddings(const std::vector<std::vector<double>>& vectors) {
  json data = json::array();
  for (std::size_t i = 0; i < vectors.size(); ++i) data.push_back({{"index", i}, {"embedding", vectors[i]}});
  return {200, json{{"data", std::move(data)}}.dump(), {}};
}

MockTransport::Reply MockTransport::failure(int status, std::string body) { return {status, std::move(body), {}}; }

namespace {

MockTransport::Reply reply_from_json(const json& j) {
  if (j.is_string()) return MockTransport::chat(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("mock reply must be a string or an object");
  MockTransport::Reply r;
  if (auto c = j.find("content"); c != j.end()) {
    r = MockTransport::chat(c->get<std::string>());
  } else {
    r.status = j.value("status", 200);
    r.body = j.value("body", std::string());
  }
  if (j.contains("status")) r.status = j.at("status").get<int>();
  r.delay = std::chrono::milliseconds(j.value("delay_ms", 0));
  return r;
}

}  // namespace

std::shared_ptr<MockTransport> MockTransport::from_script(const json& script) {
  auto mock = std::make_shared<MockTransport>();
  mock->load_script(script);
  return mock;
}

void MockTransport::load_script(const json& script) {
  if (!script.is_object()) throw ConfigError("mock script must be a JSON object");
  MockTransport& mock = *this;
  try {
    if (auto q = script.find("queue"); q != script.end()) {
      for (const auto& r : *q) mock.enqueue(reply_from_json(r));
    }
    if (auto c = script.find("calls"); c != script.end()) {
      for (auto it = c->begin(); it != c->end(); ++it) mock.on_call(std::stoul(it.key()), reply_from_json(it.value()));
    }
    if (auto h = script.find("prompt_hashes"); h != script.end()) {
      for (auto it = h->begin(); it != h->end(); ++it) mock.on_prompt_hash(it.key(), reply_from_json(it.value()));
    }
    if (auto rules = script.find("rules"); rules != script.end()) {
      for (const auto& rule : *rules) {
        std::vector<Reply> replies;
        for (const auto& r : rule.at("replies")) replies.push_back(reply_from_json(r));
        mock.when_contains(rule.at("match").get<std::vector<std::string>>(), std::move(replies));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed mock script: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("malformed mock script: ") + e.what());
  }
}

void MockTransport::enqueue(Reply reply) {
  std::lock_guard lock(mutex_);
  queue_.push_back(std::move(reply));
}

void MockTransport::on_call(std::size_t index, Reply reply) {
  std::lock_guard lock(mutex_);
  by_call_[index] = std::move(reply);
}

void MockTransport::on_prompt_hash(std::string hash, Reply reply) {
  std::lock_guard lock(mutex_);
  by_hash_[std::move(hash)] = std::move(reply);
}

void MockTransport::when_contains(std::vector<std::string> substrings, std::vector<Reply> replies) {
  if (replies.empty()) throw ConfigError("mock rule needs at least one reply");
  std::lock_guard lock(mutex_);
  rules_.push_back({std::move(substrings), std::move(replies), 0});
}

void MockTransport::set_handler(Handler handler) {
  std::lock_guard lock(mutex_);
  handler_ = std::move(handler);
}

HttpResponse MockTransport::post(const std::string& path, const std::string& body, const Headers&) {
  Request req;
  req.path = path;
  req.body = body;
  try {
    const json doc = json::parse(body);
    if (auto m = doc.find("messages"); m != doc.end()) {
      std::vector<Message> messages;
      for (const auto& e : *m) {
        messages.push_back({e.at("role").get<std::string>(), e.at("content").get<std::string>()});
        req.text += messages.back().content;
        req.text += '\n';
      }
      req.prompt_hash = prompt_hash(messages);
    } else if (auto in = doc.find("input"); in != doc.end()) {
      const auto inputs = in->get<std::vector<std::string>>();
      for (const auto& s : inputs) req.text += s + '\n';
      req.prompt_hash = prompt_hash(inputs);
    }
  } catch (const json::exception&) {
    req.text = body;
  }

  std::optional<Reply> chosen;
  Handler handler;
  {
    std::lock_guard lock(mutex_);
    req.index = log_.size();
    log_.push_back(req);
    ++in_flight_;
    max_in_flight_ = std::max(max_in_flight_, in_flight_);
    if (auto it = by_call_.find(req.index); it != by_call_.end()) {
      chosen = it->second;
    } else if (auto h = by_hash_.find(req.prompt_hash); h != by_hash_.end()) {
      chosen = h->second;
    }
    handler = handler_;
  }
  if (!chosen && handler) chosen = handler(req);
  {
    std::lock_guard lock(mutex_);
    if (!chosen) {
      for (auto& rule : rules_) {
        const bool all = std::all_of(rule.substrings.begin(), rule.substrings.end(),
                                     [&](const std::string& s) { return req.text.find(s) != std::string::npos; });
        if (!all) continue;
        chosen = rule.replies[std::min(rule.next, rule.replies.size() - 1)];
        ++rule.next;
        break;
      }
    }
    if (!chosen && !queue_.empty()) {
      chosen = queue_.front();
      queue_.pop_front();
    }
  }
  Reply reply = chosen.value_or(failure(400, "no scripted reply for call " + std::to_string(req.index)));
  if (reply.delay.count() > 0) std::this_thread::sleep_for(reply.delay);
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
  }
  HttpResponse res{reply.status, reply.body, {}};
  if (reply.status == 0) res.error = "scripted connection failure";
  return res;
}

std::size_t MockTransport::calls() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

std::vector<MockTransport::Request> MockTransport::requests() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::size_t MockTransport::max_concurrency() const {
  std::lock_guard lock(mutex_);
  return max_in_flight_;
}

}  // namespace dialogsynth::llm
