#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "json.hpp"

namespace hsharp {

/// Log-log extrapolation of a tabulated profile outside its knots, using
/// the slope of the boundary segment, on [lo_cutoff, first knot) and
/// (last knot, hi_cutoff]; zero beyond the cutoffs.
struct ProfileExtrapolation {
  double lo_cutoff = 0.0;
  double hi_cutoff = 0.0;  ///< values <= last knot disable upper extrapolation
};

/// A nonnegative function of the radius r = |x|_h.
///
/// Every kind is stored as a list of disjoint segments [lo, hi) on which the
/// profile equals c * r^p, so moments have closed forms. Tabulated profiles
/// interpolate linearly in log-log space; a segment with a zero endpoint value
/// is identically zero.
class RadialProfile {
 public:
  enum class Kind { power, truncated_power, tabulated };

  using Extrapolation = ProfileExtrapolation;

  struct Segment {
    double lo = 0.0;
    double hi = 0.0;
    double log_coeff = 0.0;  ///< log c
    double exponent = 0.0;   ///< p
    double log_lo = 0.0;
    double log_hi = 0.0;
  };

  /// coefficient * r^exponent on (0, inf).
  static RadialProfile power(double exponent, double coefficient = 1.0);
  /// coefficient * r^exponent on [r_min, r_max], zero elsewhere; r_min may be 0.
  static RadialProfile truncated_power(double exponent, double r_min, double r_max,
                                       double coefficient = 1.0);
  static RadialProfile tabulated(std::vector<double> knots, std::vector<double> values,
                                 Extrapolation extrapolation = {});
  static RadialProfile zero();

  Kind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  double coefficient() const { return coefficient_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  const Extrapolation& extrapolation() const { return extrapolation_; }
  const std::vector<Segment>& segments() const { return segments_; }

  bool is_zero() const { return segments_.empty(); }
  double operator()(double r) const;
  /// log f(e^u), -inf where the profile vanishes.
  double log_value_at_log(double u) const;

  /// Segment boundaries strictly inside (0, inf).
  std::vector<double> breakpoints() const;
  double support_lo() const;
  double support_hi() const;

  /// int_lo^hi f(r)^power r^p dr in closed form, 0 <= lo <= hi <= inf.
  /// Throws DivergenceError if the integral is infinite.
  double moment(double lo, double hi, double power, double p) const;

  /// Exponent p with f(r) ~ r^p as r -> 0, or nullopt if f vanishes near 0.
  std::optional<double> origin_exponent() const;

  /// r -> f(t r).
  RadialProfile dilated(double t) const;
  /// r -> c f(r), c >= 0.
  RadialProfile scaled(double c) const;

 private:
  RadialProfile() = default;
  void finalize();

  Kind kind_ = Kind::power;
  double exponent_ = 0.0;
  double coefficient_ = 0.0;
  double r_min_ = 0.0;
  double r_max_ = std::numeric_limits<double>::infinity();
  std::vector<double> knots_;
  std::vector<double> values_;
  Extrapolation extrapolation_;
  std::vector<Segment> segments_;
};

/// Cumulative radial mass M(R) = int_0^R f(r) r^{Q-1} dr of a profile, with
/// per-segment prefix sums kept in log space.
class CumulativeMass {
 public:
  CumulativeMass(const RadialProfile& f, int Q);

  /// log M(e^u); -inf when no mass lies below e^u, +inf when M diverges.
  double log_mass_at_log(double u) const;
  double mass(double R) const;

 private:
  std::vector<RadialProfile::Segment> segments_;
  int Q_;
  std::vector<double> log_prefix_;  // log of the mass of segments [0, i)
};

/// log int_a^b e^{log_coeff} r^k dr given la = log a, lb = log b (la may be
/// -inf, lb may be +inf); +inf when the integral diverges.
double log_power_integral(double log_coeff, double k, double la, double lb);

/// log(1 - e^x) for x <= 0.
double log1mexp(double x);
/// log(e^a + e^b).
double log_add(double a, double b);

void to_json(nlohmann::json& j, const RadialProfile& f);
/// Throws InvalidInput for malformed records.
RadialProfile profile_from_json(const nlohmann::json& j);

}  // namespace hsharp
