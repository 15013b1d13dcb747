#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace delta_lab {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured memory / enumeration budget would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters or an incomplete configuration (short theta sequence...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Result does not fit the target representation.
class RangeError : public Error {
 public:
  using Error::Error;
};

class FactoringError : public Error {
 public:
  explicit FactoringError(std::uint64_t cofactor)
      : Error("failed to split composite cofactor " + std::to_string(cofactor)),
        cofactor_(cofactor) {}
  std::uint64_t cofactor() const noexcept { return cofactor_; }

 private:
  std::uint64_t cofactor_;
};

// Quadrature did not reach its tolerance; carries the best value found.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double partial, double error_estimate)
      : Error(what), partial_(partial), error_estimate_(error_estimate) {}
  double partial() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double partial_;
  double error_estimate_;
};

}  // namespace delta_lab
