#include "hsharp/hgroup.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hsharp/error.hpp"
#include "hsharp/specfun.hpp"

namespace hsharp::hgroup {
namespace {

void require_same_group(const HPoint& x, const HPoint& y) {
  if (x.n() != y.n()) {
    throw InvalidInput("dimension mismatch: H^" + std::to_string(x.n()) + " vs H^" +
                       std::to_string(y.n()));
  }
}

}  // namespace

HPoint::HPoint(int n) : n_(n) {
  if (n < 1) throw InvalidInput("HPoint: n must be >= 1");
  coords_.assign(static_cast<std::size_t>(2 * n + 1), 0.0);
}

HPoint::HPoint(int n, std::vector<double> coords) : n_(n), coords_(std::move(coords)) {
  if (n < 1) throw InvalidInput("HPoint: n must be >= 1");
  if (coords_.size() != static_cast<std::size_t>(2 * n + 1)) {
    throw InvalidInput("HPoint: expected " + std::to_string(2 * n + 1) +
                       " coordinates, got " + std::to_string(coords_.size()));
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw InvalidInput("HPoint: non-finite coordinate");
  }
}

double HPoint::horizontal_sq() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < coords_.size(); ++i) s += coords_[i] * coords_[i];
  return s;
}

HPoint group_mul(const HPoint& x, const HPoint& y) {
  require_same_group(x, y);
  const auto n = static_cast<std::size_t>(x.n());
  std::vector<double> out(2 * n + 1);
  for (std::size_t i = 0; i < 2 * n; ++i) out[i] = x[i] + y[i];
  double twist = 0.0;
  for (std::size_t j = 0; j < n; ++j) twist += y[j] * x[n + j] - x[j] * y[n + j];
  out[2 * n] = x[2 * n] + y[2 * n] + 2.0 * twist;
  return HPoint(x.n(), std::move(out));
}

HPoint group_inv(const HPoint& x) {
  std::vector<double> out(x.coords().begin(), x.coords().end());
  for (double& c : out) c = -c;
  return HPoint(x.n(), std::move(out));
}

HPoint dilate(double r, const HPoint& x) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw InvalidInput("dilate: r must be positive and finite");
  }
  std::vector<double> out(x.coords().begin(), x.coords().end());
  for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] *= r;
  out.back() *= r * r;
  return HPoint(x.n(), std::move(out));
}

double hnorm(const HPoint& x) {
  return std::sqrt(std::hypot(x.horizontal_sq(), x.vertical()));
}

double hdist(const HPoint& p, const HPoint& q) {
  require_same_group(p, q);
  return hnorm(group_mul(group_inv(q), p));
}

double doubled_ball_volume_formula(int n) {
  if (n < 1) throw InvalidInput("n must be >= 1");
  const double nd = n;
  return 2.0 * std::pow(std::numbers::pi, nd + 0.5) * specfun::gamma(nd / 2.0) /
         ((nd + 1.0) * specfun::gamma(nd) * specfun::gamma((nd + 1.0) / 2.0));
}

GroupParams ball_volume_constant(int n) {
  if (n < 1) throw InvalidInput("n must be >= 1");
  GroupParams gp;
  gp.n = n;
  gp.Q = 2 * n + 2;
  // Slicing along the vertical axis: 2 |S^{2n-1}| int_0^1 sqrt(1 - rho^4) rho^{2n-1} drho.
  gp.Omega_Q = 0.5 * doubled_ball_volume_formula(n);
  gp.omega_Q = gp.Q * gp.Omega_Q;
  return gp;
}

}  // namespace hsharp::hgroup
