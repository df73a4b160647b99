#pragma once

#include <stdexcept>
#include <string>

namespace semipos {

/// Raised when an operation is called outside its domain (bad dimension,
/// grid mismatch, inadmissible arguments).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative or quadrature routine fails to produce a
/// finite, converged result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration schema violation; `key_path()` names the offending key
/// in `section.key` form.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key_path, const std::string& what)
      : std::runtime_error(key_path.empty() ? what : key_path + ": " + what),
        key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace semipos
