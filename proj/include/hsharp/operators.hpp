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

namespace hsharp {

/// Value of the m-linear operator at any x with |x|_h = x_radius; the output
/// is radial because both kernels depend on norms only.
///
/// HLP: the y-space is split by which of |x|, |y_1|, ..., |y_m| is largest,
///   P(s) = s^{-mQ} prod F_j(s) + sum_k int_s^inf t^{-mQ} omega_Q f_k(t) t^{Q-1} prod_{j!=k} F_j(t) dt
/// with F_j the exact ball masses of the profiles.
/// Hilbert: (S)^{-m} = Gamma(m)^{-1} int_0^inf tau^{m-1} e^{-tau S} dtau turns
/// the kernel into a product of one-dimensional Laplace-type transforms.
///
/// Throws DivergenceError when the operator integral is infinite.
double apply(OperatorKind kind, std::span<const RadialProfile> profiles, double x_radius,
             const hgroup::GroupParams& gp, const quad::QuadratureSpec& spec = {});

/// apply() at every radius of an ascending list. For HLP the tail integrals
/// are accumulated from the right, which is much cheaper than separate calls.
std::vector<double> apply_table(OperatorKind kind, std::span<const RadialProfile> profiles,
                                std::span<const double> radii, const hgroup::GroupParams& gp,
                                const quad::QuadratureSpec& spec = {});

/// Log-spaced knots covering [lo, hi] with the given density, merged with
/// the extra points that fall inside.
std::vector<double> log_knots(double lo, double hi, int per_decade,
                              std::span<const double> extra = {});

/// The operator output tabulated on knots, as a log-log interpolated profile
/// extrapolated down to 0 and up to hi_cutoff.
RadialProfile operator_profile(OperatorKind kind, std::span<const RadialProfile> profiles,
                               std::span<const double> knots, double hi_cutoff,
                               const hgroup::GroupParams& gp,
                               const quad::QuadratureSpec& spec = {});

/// f_j = |x|_h^{sigma_j}, optionally restricted to [r_min, r_max]; j is 1-based.
/// Throws InvalidInput when j is not in 1..m.
RadialProfile extremizer_profile(const ExponentSet& e, int j,
                                 std::optional<std::pair<double, double>> truncation = std::nullopt);

struct RadializeOptions {
  double r_min = 1e-2;
  double r_max = 1e2;
  int knots_per_decade = 16;
  ProfileExtrapolation extrapolation{0.0, 0.0};
  std::uint64_t stream = 0x5a17;
};

struct RadializedProfile {
  RadialProfile profile = RadialProfile::zero();
  std::vector<double> std_errors;  ///< per knot
  /// The per-knot standard errors as a profile on the same knots.
  RadialProfile error_profile() const;
};

/// g(r) = mean of f(delta_r xi) over unit-sphere points xi drawn from the
/// polar measure. The same directions are used at every knot, so the profile
/// is smooth in r. f identically zero on the samples gives the zero profile.
RadializedProfile radialize_with_error(const mc::PointFunction& f, const hgroup::GroupParams& gp,
                                       const mc::MCSpec& mc, const RadializeOptions& options = {});
RadialProfile radialize(const mc::PointFunction& f, const hgroup::GroupParams& gp,
                        const mc::MCSpec& mc, const RadializeOptions& options = {});

/// Operator value at radius x_radius for general (non-radial) f_j: directions
/// xi_j are sampled, and for each draw the m-fold radial integral along the
/// rays r -> delta_r xi_j is done by nested quadrature. Supports m <= 2.
/// ray_breaks lists the radii where the f_j may jump along a ray.
mc::MCResult apply_mc(OperatorKind kind, std::span<const mc::PointFunction> fs, double x_radius,
                      const hgroup::GroupParams& gp, const mc::MCSpec& mc,
                      std::uint64_t stream = 0x0b5e, const quad::QuadratureSpec& spec = {},
                      std::span<const double> ray_breaks = {});

struct NeutralityCheck {
  double radialized = 0.0;      ///< apply() on the radialized profiles
  double radialized_se = 0.0;   ///< first-order propagation of the per-knot errors
  mc::MCResult direct;          ///< apply_mc() on the original functions
  double combined_se() const;
  /// |radialized - direct| in units of the combined standard error.
  double z_score() const;
};

NeutralityCheck radialization_neutrality(OperatorKind kind, std::span<const mc::PointFunction> fs,
                                         double x_radius, const hgroup::GroupParams& gp,
                                         const mc::MCSpec& mc,
                                         const RadializeOptions& options = {},
                                         std::span<const double> ray_breaks = {});

}  // namespace hsharp
