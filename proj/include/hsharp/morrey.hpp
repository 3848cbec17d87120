#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hsharp/hgroup.hpp"
#include "hsharp/montecarlo.hpp"
#include "hsharp/params.hpp"
#include "hsharp/profile.hpp"
#include "hsharp/quad.hpp"
#include "hsharp/report.hpp"

namespace hsharp {

/// L^{q, lambda}(H^n, |x|^alpha, |x|^gamma_w).
struct MorreySpaceSpec {
  double q = 2.0;
  double lambda = -0.25;
  double alpha = 0.0;
  double gamma_w = 0.0;

  /// Throws InvalidInput unless q >= 1, -1/q <= lambda < 0 and alpha > -Q.
  void check(int Q) const;
  /// Q lambda - gamma_w/q + alpha (lambda + 1/q): the norm of f(delta_t .)
  /// is t to this power times the norm of f.
  double scaling_exponent(int Q) const;
};

/// Source space of f_j: L^{q_j, lambda_j}(|x|^alpha, |x|^{q_j gamma_j / q}).
MorreySpaceSpec source_space(const ParamSet& p, int j);
/// Target space: L^{q, lambda}(|x|^alpha, |x|^gamma).
MorreySpaceSpec target_space(const ParamSet& p);

/// Balls B(a, R) probed by the estimator. Centers are the origin plus
/// delta_c(d) for every nonzero c in center_radii and d in center_directions.
struct BallGrid {
  std::vector<double> center_radii;
  std::vector<hgroup::HPoint> center_directions;
  std::vector<double> radii;

  /// Center norms {0, 0.25, 1, 4}; directions e_1 and the vertical axis;
  /// 17 radii log-spaced over [1e-2, 1e2].
  static BallGrid default_grid(int n);
  /// Center norms and radii multiplied by s.
  BallGrid scaled(double s) const;
  /// Throws InvalidInput on unsorted or nonpositive radii, a missing 0 in
  /// center_radii, or directions that are not unit vectors of H^n.
  void check(int n) const;
};

struct MorreyCell {
  double center_radius = 0.0;
  int direction = -1;  ///< index into center_directions, -1 for the origin
  double R = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  bool exact = false;  ///< origin cell of a radial profile, done in closed form
};

struct MorreyEstimate {
  /// Maximum over the grid: a lower bound of the supremum, never the supremum itself.
  double value = 0.0;
  double argmax_center_radius = 0.0;
  int argmax_direction = -1;
  double argmax_R = 0.0;
  double std_error = 0.0;  ///< Monte Carlo error of the argmax cell only
  std::vector<MorreyCell> cells;

  /// Largest value over the origin-centered cells.
  double origin_value() const;
};

/// Cell value w_1(B)^{-(lambda + 1/q)} (int_B |f|^q w_2)^{1/q} for every grid
/// cell. Origin-centered cells are exact radial moments; off-center cells use
/// the directional estimator of module mc with exact radial moments along
/// every ray, with w_1(B) and the integral taken from the same directions and
/// the error obtained by the delta method. All cells share one direction set,
/// so a cell's value does not depend on the rest of the grid.
///
/// Throws DivergenceError naming the cell when an integral is infinite.
MorreyEstimate morrey_norm(const RadialProfile& f, const MorreySpaceSpec& space,
                           const BallGrid& grid, const hgroup::GroupParams& gp,
                           const mc::MCSpec& mc);

/// The same estimator for a general function: the radial integrals along the
/// rays are done by quadrature, and every cell (origin included) is Monte Carlo.
/// ray_breaks lists the radii where f may jump along a ray.
MorreyEstimate morrey_norm_mc(const mc::PointFunction& f, const MorreySpaceSpec& space,
                              const BallGrid& grid, const hgroup::GroupParams& gp,
                              const mc::MCSpec& mc, std::span<const double> ray_breaks = {},
                              const quad::QuadratureSpec& ray_spec = {});

/// Compares morrey_norm of r -> f(t r) on the grid scaled by 1/t against
/// t^{scaling_exponent} times morrey_norm of f on the original grid, cell by
/// cell. rel_err is the worst cell.
VerificationReport verify_dilation(const RadialProfile& f, double t, const MorreySpaceSpec& space,
                                   const BallGrid& grid, const hgroup::GroupParams& gp,
                                   const mc::MCSpec& mc, double tolerance = 1e-10);

struct SharpnessResult {
  double ratio = 0.0;
  double constant = 0.0;
  double target_norm = 0.0;
  std::vector<double> source_norms;
  double ratio_over_constant() const { return ratio / constant; }
};

/// ||T(f_1..f_m)|| / prod ||f_j|| for the extremizers |x|^{sigma_j} restricted
/// to [r_min, r_max]. The operator output is tabulated (knots_per_decade in
/// log r) and all norms are morrey_norm on the same grid.
/// Throws InvalidInput when p fails strict validation.
SharpnessResult sharpness(OperatorKind kind, const ParamSet& p, std::pair<double, double> truncation,
                          const BallGrid& grid, const quad::QuadratureSpec& spec,
                          const mc::MCSpec& mc, int knots_per_decade = 48);

/// sharpness() as a report: passes when ratio <= constant (1 + tolerance).
VerificationReport sharpness_ratio(OperatorKind kind, const ParamSet& p,
                                   std::pair<double, double> truncation, const BallGrid& grid,
                                   const quad::QuadratureSpec& spec, const mc::MCSpec& mc,
                                   double tolerance = 1e-3);

struct RadializationContraction {
  double radialized = 0.0;  ///< morrey_norm of the radialized profile
  MorreyEstimate direct;    ///< morrey_norm_mc of f
  /// radialized <= direct + k * se, with se combining both errors.
  bool holds(double k = 3.0) const;
  double radialized_se = 0.0;
};

RadializationContraction radialization_contraction(const mc::PointFunction& f,
                                                   const MorreySpaceSpec& space,
                                                   const BallGrid& grid,
                                                   const hgroup::GroupParams& gp,
                                                   const mc::MCSpec& mc, double r_min,
                                                   double r_max, int knots_per_decade,
                                                   std::span<const double> ray_breaks = {});

void to_json(nlohmann::json& j, const MorreySpaceSpec& s);
void to_json(nlohmann::json& j, const BallGrid& g);
void to_json(nlohmann::json& j, const MorreyCell& c);
void to_json(nlohmann::json& j, const MorreyEstimate& e);

}  // namespace hsharp
