#pragma once

#include <stdexcept>
#include <string>

namespace osic {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (matmul, transmit, detector inputs).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A pivot collapsed during elimination; the matrix is singular or rank deficient.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its domain: NaN/Inf entries, negative variance, bad sizes.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Configuration problem. `key()` names the offending setting.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace osic
