#pragma once

#include <stdexcept>
#include <string>

namespace coherent {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error record.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error("invalid_argument", message) {}
};

/// An iterative solver hit its iteration cap.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& message, double residual)
      : Error("solver_failure", message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// No feasible length scale: the minimum axial frequency exceeds the
/// stability-limited maximum.
class EmptyRange : public Error {
 public:
  explicit EmptyRange(const std::string& message)
      : Error("empty_range", message) {}
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& message, double estimate)
      : Error("integration_error", message), estimate_(estimate) {}

  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

class DegenerateNormalization : public Error {
 public:
  explicit DegenerateNormalization(const std::string& message)
      : Error("degenerate_normalization", message) {}
};

class UnidentifiableFit : public Error {
 public:
  explicit UnidentifiableFit(const std::string& message)
      : Error("unidentifiable_fit", message) {}
};

/// Configuration document could not be parsed or validated. `key()` names
/// the offending key for validation errors; `line()`/`column()` are set for
/// syntax errors (1-based, 0 when not applicable).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::string key, int line = 0,
              int column = 0)
      : Error(line > 0 ? "config_parse_error" : "config_validation_error",
              message),
        key_(std::move(key)),
        line_(line),
        column_(column) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string key_;
  int line_;
  int column_;
};

}  // namespace coherent
