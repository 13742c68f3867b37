#pragma once

#include <stdexcept>
#include <string>

namespace rok {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pivot fell below the scale-relative threshold.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The Krylov start vector f(y) is (numerically) zero.
class ZeroStartVector : public Error {
 public:
  using Error::Error;
};

/// A right-hand side or Jacobian-vector product produced NaN/Inf.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// The step-size controller asked for h below h_min, or the step budget ran out.
class StepSizeUnderflow : public Error {
 public:
  StepSizeUnderflow(const std::string& what, double t, double h)
      : Error(what), t_(t), h_(h) {}
  double t() const { return t_; }
  double h() const { return h_; }

 private:
  double t_;
  double h_;
};

/// Malformed tableau or configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rok
