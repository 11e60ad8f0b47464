#pragma once

#include <stdexcept>
#include <string>

namespace pcpmkit {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Inconsistent operand or problem-data dimensions. The message names the
/// offending dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Scalar parameter outside its admissible range (t <= 0, gamma outside (0,2), ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Operation applied to a problem form it does not support.
class FormError : public Error {
 public:
  using Error::Error;
};

/// A linear system matrix that has to be positive definite is not.
class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

/// File or parse failure in problem/report I/O.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcpmkit
