#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hsharp/hgroup.hpp"
#include "hsharp/params.hpp"
#include "hsharp/profile.hpp"
#include "json.hpp"

namespace hsharp::quad {

enum class Scheme { gauss_legendre_composite, double_exponential };
enum class InfinityTransform { rational_map, exp_map };

struct QuadratureSpec {
  Scheme scheme = Scheme::double_exponential;
  /// Geometric panels per graded end (Gauss-Legendre scheme only).
  int panels = 40;
  int nodes_per_panel = 20;
  InfinityTransform infinity_transform = InfinityTransform::rational_map;
  double rel_target = 1e-12;

  /// Throws InvalidInput unless panels, nodes_per_panel >= 1 and
  /// rel_target lies in (0, 1e-2].
  void check() const;
};

using Integrand = std::function<double(double)>;

/// int_a^b f(x) dx; either bound may be infinite. The range is split at the
/// given breakpoints, which should include every kink of f.
///
/// With the double-exponential scheme, singular behaviour is supported at a
/// finite left endpoint and at infinite ends. A non-finite integrand value or
/// a tail that does not decay raises DivergenceError; failure to reach
/// rel_target raises ConvergenceError.
double integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec = {},
                 std::span<const double> breakpoints = {});

/// As integrate() on a finite range with the double-exponential scheme, for
/// integrands with kinks at unknown places. A piece that misses rel_target is
/// bisected until every part meets its share, by length, of rel_target times
/// the integral of |f|. Pieces that converge directly give the same value as
/// integrate().
double integrate_adaptive(const Integrand& f, double a, double b, const QuadratureSpec& spec = {},
                          std::span<const double> breakpoints = {});

/// As integrate() over the whole line, with the double-exponential node
/// cloud centred at `center`. Useful when the integrand's mass sits far from 0.
double integrate_line(const Integrand& f, double center, const QuadratureSpec& spec = {});

/// As integrate(), for integrands in a log-radius variable u whose magnitude
/// must stay bounded: the range is clipped to [-cap, cap]. An infinite end
/// whose integrand has not died out at the cap raises DivergenceError.
double integrate_capped(const Integrand& f, double a, double b, double cap,
                        const QuadratureSpec& spec = {}, std::span<const double> breakpoints = {});

/// omega_Q * int_0^inf F(r) r^{Q-1} dr, i.e. the integral over H^n of x -> F(|x|_h).
double radial_integral(const Integrand& F, const hgroup::GroupParams& gp,
                       const QuadratureSpec& spec = {}, std::span<const double> breakpoints = {});

/// Same for a profile, by quadrature in u = log r (not by its closed-form moments).
double radial_integral(const RadialProfile& f, const hgroup::GroupParams& gp,
                       const QuadratureSpec& spec = {});

/// Sub-integrals of the HLP constant over E_0 (all |y_j| <= 1) and E_k
/// (|y_k| >= 1 is the largest), k = 1..m.
struct RegionIntegrals {
  std::vector<double> regions;
  double total = 0.0;
};

/// Region-by-region evaluation of
///   omega_Q^m int prod_j r_j^{sigma_j+Q-1} / max(1, r_1^Q, ..., r_m^Q)^m dr.
/// Every power integral is done by nested quadrature; divergence is detected
/// numerically.
RegionIntegrals hlp_region_integrals(const ExponentSet& e, const hgroup::GroupParams& gp,
                                     const QuadratureSpec& spec = {});
double hlp_constant_oracle(const ExponentSet& e, const hgroup::GroupParams& gp,
                           const QuadratureSpec& spec = {});

/// omega_Q^m int prod_j r_j^{sigma_j+Q-1} / (1 + r_1^Q + ... + r_m^Q)^m dr.
/// After t_j = r_j^Q the last variable is peeled off one at a time,
///   int_0^inf t^{a-1} (T + t)^{-s} dt = T^{a-s} int_0^inf t^{a-1} (1 + t)^{-s} dt,
/// and each of the m remaining one-dimensional integrals is done numerically.
double hilbert_constant_oracle(const ExponentSet& e, const hgroup::GroupParams& gp,
                               const QuadratureSpec& spec = {});

/// int_0^inf t^{a-1} (1 + t)^{-s} dt by quadrature in log t.
double beta_type_integral(double a, double s, const QuadratureSpec& spec = {});

void to_json(nlohmann::json& j, const QuadratureSpec& spec);

}  // namespace hsharp::quad
