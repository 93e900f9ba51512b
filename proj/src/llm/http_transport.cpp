#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "dialogsynth/llm/transport.hpp"
#include "dialogsynth/util/errors.hpp"

namespace dialogsynth::llm {

HttpTransport::HttpTransport(const std::string& endpoint, std::chrono::milliseconds timeout) : timeout_(timeout) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must start with http:// or https://: " + endpoint);
  const std::string scheme = endpoint.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported endpoint scheme: " + scheme);
  const auto path_start = endpoint.find('/', scheme_end + 3);
  origin_ = endpoint.substr(0, path_start);
  if (path_start != std::string::npos) base_path_ = endpoint.substr(path_start);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
}

HttpResponse HttpTransport::post(const std::string& path, const std::string& body, const Headers& headers) {
  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  std::string full = base_path_ + (path.empty() || path.front() == '/' ? path : "/" + path);
  auto res = client.Post(full, h, body, "application/json");
  if (!res) return {0, {}, httplib::to_string(res.error())};
  return {res->status, res->body, {}};
}

}  // namespace dialogsynth::llm
