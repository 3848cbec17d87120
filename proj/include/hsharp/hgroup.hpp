#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hsharp::hgroup {

/// A point of the Heisenberg group H^n stored as 2n+1 coordinates:
/// x_1..x_2n horizontal, x_{2n+1} vertical.
class HPoint {
 public:
  /// The identity element of H^n.
  explicit HPoint(int n);
  /// Throws InvalidInput unless coords has 2n+1 finite entries and n >= 1.
  HPoint(int n, std::vector<double> coords);

  int n() const { return n_; }
  std::size_t dim() const { return coords_.size(); }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

  /// Sum of squares of the horizontal coordinates.
  double horizontal_sq() const;
  double vertical() const { return coords_.back(); }

  friend bool operator==(const HPoint&, const HPoint&) = default;

 private:
  int n_;
  std::vector<double> coords_;
};

HPoint group_mul(const HPoint& x, const HPoint& y);
HPoint group_inv(const HPoint& x);

/// delta_r: horizontal coordinates scaled by r, the vertical one by r^2.
HPoint dilate(double r, const HPoint& x);

/// Homogeneous norm [(sum_{i<=2n} x_i^2)^2 + x_{2n+1}^2]^{1/4}.
double hnorm(const HPoint& x);

/// Left-invariant distance |q^{-1} p|_h.
double hdist(const HPoint& p, const HPoint& q);

/// Dimension constants of H^n.
struct GroupParams {
  int n = 1;
  int Q = 4;              ///< homogeneous dimension 2n + 2
  double Omega_Q = 0.0;   ///< Lebesgue volume of the unit ball B(0, 1)
  double omega_Q = 0.0;   ///< Q * Omega_Q, the polar-coordinates surface constant
};

/// Throws InvalidInput for n < 1.
///
/// Omega_Q = pi^{n+1/2} Gamma(n/2) / ((n+1) Gamma(n) Gamma((n+1)/2)), the
/// volume of {x : |x|_h < 1}. The frequently quoted expression with a leading
/// factor 2 (see doubled_ball_volume_formula) overstates it by exactly 2.
GroupParams ball_volume_constant(int n);

/// 2 pi^{n+1/2} Gamma(n/2) / ((n+1) Gamma(n) Gamma((n+1)/2)).
double doubled_ball_volume_formula(int n);

}  // namespace hsharp::hgroup
