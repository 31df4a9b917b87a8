#pragma once

#include <stdexcept>
#include <string>

namespace tinylof {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A sample, feature vector or file row violated its contract (wrong arity,
/// non-finite value, malformed text).
class InputError : public Error {
public:
  using Error::Error;
};

/// A configuration value is out of range or inconsistent.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Too few training points for the requested neighbourhood size.
class InsufficientPointsError : public Error {
public:
  using Error::Error;
};

/// Operation not allowed in the pipeline's current phase.
class InvalidStateError : public Error {
public:
  using Error::Error;
};

/// Serialized model is truncated or carries a bad magic/version.
class FormatError : public Error {
public:
  using Error::Error;
};

} // namespace tinylof
