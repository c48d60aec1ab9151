#pragma once

#include <stdexcept>
#include <string>

namespace polarred {

/// Operand shapes do not match the model they are used with.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point lies on (or within the regularity threshold of) a singular stratum.
class RegularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical check of model axioms exceeded its tolerance.
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace polarred
