#pragma once

#include <stdexcept>
#include <string>

namespace roughmle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (H out of range,
/// evaluation on a kernel singularity, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Cholesky hit a non-positive pivot: the covariance is numerically indefinite.
class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Explicit Euler step too large relative to the fast time scale.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// Requested sampling interval is not a multiple of the path step.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

}  // namespace roughmle
