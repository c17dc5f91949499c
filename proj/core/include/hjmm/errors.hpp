#pragma once

#include <stdexcept>
#include <string>

namespace hjmm {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structural misuse: mismatched grids, mismatched weights, bad dimensions.
struct StructuralError : Error {
  using Error::Error;
};

// A value outside its mathematical domain (negative intensity, Y <= 0, ...).
struct DomainError : Error {
  using Error::Error;
};

// A Monte Carlo estimate whose standard error exceeds the requested tolerance.
struct AccuracyError : Error {
  using Error::Error;
};

// Configuration file problems.  `field` names the offending key when known.
struct ConfigError : Error {
  std::string field;
  explicit ConfigError(const std::string& what, std::string field_ = {})
      : Error(field_.empty() ? what : field_ + ": " + what), field(std::move(field_)) {}
};

}  // namespace hjmm
