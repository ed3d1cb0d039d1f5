#pragma once

#include <stdexcept>
#include <string>

namespace chaoskit {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Nonfinite or otherwise out-of-contract argument.
class InvalidInputError : public Error {
  public:
    using Error::Error;
};

/// Vector/matrix/ensemble dimensions do not line up.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A computation would exceed a configured cost ceiling.
class ResourceLimitError : public Error {
  public:
    using Error::Error;
};

/// Configuration document is malformed or violates a constraint.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// A particle state became nonfinite during time stepping.
class DivergenceError : public Error {
  public:
    DivergenceError(const std::string& msg, int particle, long step)
        : Error(msg), particle(particle), step(step) {}

    int particle;
    long step;
};

}  // namespace chaoskit
