#pragma once

#include <stdexcept>
#include <string>

namespace sysguard {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Policy violates its invariants (empty system message, missing key, ...).
class PolicyError : public Error {
 public:
  using Error::Error;
};

// Message ordering rule broken (e.g. a second System message).
class OrderingError : public Error {
 public:
  using Error::Error;
};

// Empty content where a role requires it.
class ContentError : public Error {
 public:
  using Error::Error;
};

// Malformed message sequence handed to a completion backend.
class SequenceError : public Error {
 public:
  using Error::Error;
};

// Generic invalid-argument error for text operations.
class InputError : public Error {
 public:
  using Error::Error;
};

// Reference key is not a non-empty digit string.
class KeyFormatError : public Error {
 public:
  using Error::Error;
};

// Evaluator reply contains no rating in [0,5].
class RatingParseError : public Error {
 public:
  using Error::Error;
};

// Text does not match the self-reminder wrap shape.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Attempt to wrap an already wrap-shaped prompt.
class DoubleWrapError : public Error {
 public:
  using Error::Error;
};

// Mock reply text does not parse as "[TAG] body".
class GrammarError : public Error {
 public:
  using Error::Error;
};

// Bad or unknown name in a config file / request.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unknown session id.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Audit persistence failure. Turns fail closed on this.
class StorageError : public Error {
 public:
  using Error::Error;
};

// Table rendering requested for an empty result set.
class EmptyReportError : public Error {
 public:
  using Error::Error;
};

// Completion backend failure. `transient()` distinguishes retryable
// connection/5xx failures from permanent auth/shape errors; `attempt()`
// carries the harness attempt index when raised mid-protocol (-1 otherwise).
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& what, bool transient = false, int attempt = -1)
      : Error(what), transient_(transient), attempt_(attempt) {}

  bool transient() const { return transient_; }
  int attempt() const { return attempt_; }

 private:
  bool transient_;
  int attempt_;
};

}  // namespace sysguard
