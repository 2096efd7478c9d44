#pragma once

#include <stdexcept>
#include <string>

namespace rbsim {

// Raised when a caller passes a value outside an operation's domain.
class InvalidParameter : public std::invalid_argument {
 public:
  explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when measured/synthetic data cannot be fitted by construction.
class InvalidData : public std::invalid_argument {
 public:
  explicit InvalidData(const std::string& what) : std::invalid_argument(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rbsim
