#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hsharp/hgroup.hpp"
#include "json.hpp"

namespace hsharp::mc {

struct MCSpec {
  std::int64_t samples = 4096;
  std::uint64_t seed = 20240611;
  int shards = 8;

  /// Throws InvalidInput unless samples >= 1000 and shards >= 1.
  void check() const;
};

/// Counter-based generator: the k-th draw is a hash of (seed, stream, k), so
/// any shard can be replayed without touching the others.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream key for a sub-task, e.g. a shard of a grid cell.
std::uint64_t sub_stream(std::uint64_t stream, std::uint64_t index);

/// Uniform point of the unit ball {|x|_h < 1}, by rejection from its bounding box.
hgroup::HPoint sample_unit_ball(int n, CounterRng& rng);

/// Point of the unit sphere distributed by the polar-coordinates measure
/// normalised to 1, i.e. the radial projection delta_{1/|u|} u of a uniform
/// ball point u. With this measure
///   int_{H^n} F dx = omega_Q int_0^inf r^{Q-1} E[F(delta_r xi)] dr.
hgroup::HPoint sample_unit_sphere(int n, CounterRng& rng);

struct MCResult {
  double estimate = 0.0;
  double std_error = 0.0;
};

using PointFunction = std::function<double(const hgroup::HPoint&)>;

/// int_{B(center, radius)} f dx.
///
/// Default: uniform proposals in the box [-R, R]^{2n} x [-R^2, R^2] are left
/// translated by the center (a measure-preserving map) and accepted when
/// hdist(x, center) < R. With singular_exponent = beta in (-Q, 0) and a ball
/// containing the origin, proposals instead have density proportional to
/// |x|_h^beta on B(0, |center| + R), which keeps the variance of integrands
/// like |x|_h^beta bounded.
///
/// Throws SamplingError when fewer than 1e-4 of the proposals land in the ball.
MCResult mc_ball_integral(const PointFunction& f, const hgroup::HPoint& center, double radius,
                          const hgroup::GroupParams& gp, const MCSpec& mc,
                          std::uint64_t stream = 0,
                          std::optional<double> singular_exponent = std::nullopt);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// The set {r > 0 : hdist(delta_r xi, center) < radius} for a unit-sphere
/// point xi, as sorted disjoint intervals. Along the ray the condition is a
/// quartic inequality in r, solved by root isolation and bisection.
std::vector<Interval> ray_ball_intervals(const hgroup::HPoint& xi, const hgroup::HPoint& center,
                                         double radius);

/// Fills `out` with per-direction quantities for the intervals of one ray.
using RayFunction = std::function<void(const hgroup::HPoint& xi, std::span<const Interval> ray,
                                       std::span<double> out)>;

/// Per-direction samples of several ball integrals computed from the same
/// directions. Row i holds omega_Q * out_i, so each column mean is an
/// unbiased estimate of an integral over the ball.
struct DirectionalSamples {
  int width = 0;
  std::vector<double> values;  // row-major, samples x width

  std::size_t rows() const { return width == 0 ? 0 : values.size() / width; }
  double mean(int k) const;
  /// Covariance of the column means k and l.
  double mean_covariance(int k, int l) const;
  MCResult result(int k) const;
};

/// Directional ("radial-exact") ball integration: the directions are drawn
/// once per (seed, stream) independently of the ball, and the radial part
/// along every direction is integrated by the ray function. Because the
/// directions do not depend on the ball, the estimate is exactly covariant
/// under dilations of the ball and the integrand.
DirectionalSamples directional_ball_samples(int width, const RayFunction& ray_fn,
                                            const hgroup::HPoint& center, double radius,
                                            const hgroup::GroupParams& gp, const MCSpec& mc,
                                            std::uint64_t stream);

using PointRowFunction = std::function<void(const hgroup::HPoint& x, std::span<double> out)>;

/// Uniform samples of B(center, radius) in the same row layout: the points
/// are center * delta_radius(u) with u uniform in the unit ball, drawn per
/// (seed, stream), and each row is |B| = Omega_Q radius^Q times out. Like
/// the directional estimator it is exactly covariant under dilations.
DirectionalSamples uniform_ball_samples(int width, const PointRowFunction& point_fn,
                                        const hgroup::HPoint& center, double radius,
                                        const hgroup::GroupParams& gp, const MCSpec& mc,
                                        std::uint64_t stream);

void to_json(nlohmann::json& j, const MCSpec& mc);

}  // namespace hsharp::mc
