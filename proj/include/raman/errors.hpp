#pragma once

#include <stdexcept>
#include <string>

namespace raman {

// Invalid input or configuration; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRangeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Step size too coarse for the requested dynamics.
class ResolutionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class PreconditionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// An algorithm failed to converge or drifted beyond tolerance; maps to exit code 3.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace raman
