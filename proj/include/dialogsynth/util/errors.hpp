#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace dialogsynth {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed ingest document; carries the JSON path of the offending field.
class IngestError : public Error {
 public:
  IngestError(std::string field_path, const std::string& message)
      : Error("ingest error at '" + field_path + "': " + message), field_path_(std::move(field_path)) {}
  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

/// A diagnosis label outside the configured label universe.
class LabelUniverseError : public Error {
 public:
  explicit LabelUniverseError(std::string label)
      : Error("label '" + label + "' is not in the configured label universe"), label_(std::move(label)) {}
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

/// Text that does not match an expected grammar. `offset` is a byte offset
/// into `input` where the mismatch was detected.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string input, std::size_t offset)
      : Error(message + " (at byte " + std::to_string(offset) + ")"),
        input_(std::move(input)),
        offset_(offset) {}
  const std::string& input() const noexcept { return input_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string input_;
  std::size_t offset_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SerializationError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A collaborator (embedding backend, judge) returned data breaking its contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The concept checker could not complete (e.g. the embedding backend failed).
class CheckerError : public Error {
 public:
  using Error::Error;
};

/// A statistic is undefined for the given input (e.g. zero variance).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Backend still failing after the retry budget, or unreachable.
class BackendError : public Error {
 public:
  BackendError(const std::string& message, int last_status, int attempts)
      : Error(message), last_status_(last_status), attempts_(attempts) {}
  /// 0 when the last attempt failed at the transport level.
  int last_status() const noexcept { return last_status_; }
  int attempts() const noexcept { return attempts_; }

 private:
  int last_status_;
  int attempts_;
};

/// Non-retryable client error (4xx other than 408/429).
class RequestError : public Error {
 public:
  RequestError(const std::string& message, int status) : Error(message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace dialogsynth
