#pragma once

#include <stdexcept>
#include <string>

namespace hsharp {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, non-finite coordinates, bad sizes.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (poles, inadmissible exponents).
class DomainError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// An integral that does not converge, detected numerically or analytically.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Quadrature that failed to reach its target before the refinement limit.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo sampling that could not produce usable samples.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace hsharp
