#pragma once

#include <stdexcept>
#include <string>

namespace charax {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN/Inf in a field or an input sample.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Time step exceeds the explicit stability limit.
class CflError : public Error {
 public:
  using Error::Error;
};

/// A run had to stop: lost positivity, non-monotone coordinate, drift...
class SolverAbort : public Error {
 public:
  using Error::Error;
};

/// Malformed problem definition or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation called outside its domain of validity (p < 1, past shock time, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace charax
