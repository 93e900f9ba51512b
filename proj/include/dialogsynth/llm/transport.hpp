#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace dialogsynth::llm {

using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  /// 0 when no HTTP response was received (connection refused, timeout).
  int status = 0;
  std::string body;
  /// Transport-level error description when status is 0.
  std::string error;
};

/// Posts a JSON body to `path` relative to the backend endpoint.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body, const Headers& headers) = 0;
};

/// HTTP(S) transport. `endpoint` is a base URL such as
/// "https://host:8000/v1"; request paths are appended to its path.
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(const std::string& endpoint,
                         std::chrono::milliseconds timeout = std::chrono::milliseconds(120000));
  HttpResponse post(const std::string& path, const std::string& body, const Headers& headers) override;

 private:
  std::string origin_;
  std::string base_path_;
  std::chrono::milliseconds timeout_;
};

}  // namespace dialogsynth::llm
