#pragma once

#include <stdexcept>
#include <string>

namespace zecmac {

// Every error raised by the library derives from Error; the CLI maps the
// subclass to its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input, unknown variable, alphabet mismatch, violated assumption.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Enumeration or search space exceeds a configured cap.
class CapError : public Error {
 public:
  using Error::Error;
};

// A guaranteed property of a construction did not hold.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// A channel output that no codeword can produce.
class ChannelContractError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace zecmac
