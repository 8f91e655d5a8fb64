#pragma once

#include <stdexcept>

namespace demix {

// Exit codes used by the CLI when one of these escapes to main.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitNumerical = 4,
};

// Invalid dimensions, divisibility violations, unknown names, bad config files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A link function was handed to a pipeline that cannot process it.
class UnsupportedLinkError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Numerically invalid argument: non-finite input, zero-norm reference, ...
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation failed to produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int exit_code_for(const std::exception& e);

}  // namespace demix
