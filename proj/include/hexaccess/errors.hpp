#pragma once

#include <stdexcept>
#include <string>

namespace hexaccess {

/// Input outside an operation's mathematical domain (bad coordinates, degenerate geometry).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data. The CLI maps this to exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lookup failures and request-level conflicts, surfaced by the HTTP layer as 404 / 409 / 422.
class NotFoundError : public std::runtime_error {
 public:
  NotFoundError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidRequestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hexaccess
