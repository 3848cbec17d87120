#pragma once

namespace hsharp::specfun {

struct SpecialValue {
  double value = 0.0;
  double abs_err_estimate = 0.0;
};

/// Gamma function on (0, 170] by a Lanczos approximation, and on
/// (-170, 0) minus the integers by reflection.
/// Throws DomainError at poles and OverflowError outside the supported range.
double gamma(double x);

/// gamma(x) together with a rounding-error estimate.
SpecialValue gamma_with_error(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0, assembled in log space.
double beta(double a, double b);
double log_beta(double a, double b);

}  // namespace hsharp::specfun
