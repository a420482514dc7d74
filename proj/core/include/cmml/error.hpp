#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmml {

// Base for every recoverable failure raised by the library. Precondition
// violations on programmer-supplied arguments throw std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed tabular input (ragged rows, duplicate headers, unreadable file).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what, std::size_t row = npos)
      : Error(what), row_(row) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // Zero-based data row the error refers to, or npos when not row-specific.
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class UnknownFeatureError : public Error {
 public:
  explicit UnknownFeatureError(const std::string& feature)
      : Error("unknown feature '" + feature + "'"), feature_(feature) {}
  UnknownFeatureError(const std::string& what, const std::string& feature)
      : Error(what), feature_(feature) {}

  const std::string& feature() const noexcept { return feature_; }

 private:
  std::string feature_;
};

// Gradient descent observed a rising objective for too many iterations.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmml
