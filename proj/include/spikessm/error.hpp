#pragma once

#include <stdexcept>
#include <string>

namespace spikessm {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// An input value is outside the domain of the operation (empty, non-finite).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Sequence lengths or matrix shapes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// The requested reset mode has no implementation for this operation.
class UnsupportedModeError : public Error {
 public:
  using Error::Error;
};

// Zero-order hold needs an invertible state matrix.
class SingularDiscretizationError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// A library invariant was broken by the caller's data.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace spikessm
