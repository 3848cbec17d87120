#include "hsharp/morrey.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#include "hsharp/constants.hpp"
#include "hsharp/error.hpp"
#include "hsharp/operators.hpp"
#include "hsharp/parallel.hpp"

namespace hsharp {

using hgroup::HPoint;

namespace {

// Every off-center cell reads the same directions, so a cell's estimate
// depends on its own ball only.
constexpr std::uint64_t kDirectionStream = 0x6d6f72726579ULL;
constexpr std::uint64_t kPointStream = 0x62616c6cULL;

// Balls with R below this fraction of |a| are seen from the origin under a
// tiny solid angle, so they are sampled by uniform points instead of rays.
constexpr double kDirectionalReach = 0.5;

bool use_rays(double center_radius, double R) { return R >= kDirectionalReach * center_radius; }

struct CellGeometry {
  double center_radius = 0.0;
  int direction = -1;
  double R = 0.0;
};

std::vector<CellGeometry> enumerate_cells(const BallGrid& grid) {
  std::vector<CellGeometry> cells;
  for (double R : grid.radii) cells.push_back({0.0, -1, R});
  for (double c : grid.center_radii) {
    if (c == 0.0) continue;
    for (std::size_t d = 0; d < grid.center_directions.size(); ++d) {
      for (double R : grid.radii) cells.push_back({c, static_cast<int>(d), R});
    }
  }
  return cells;
}

std::string describe(const CellGeometry& g) {
  std::ostringstream os;
  os.precision(6);
  os << "cell (center norm " << g.center_radius << ", direction " << g.direction << ", R " << g.R
     << ")";
  return os.str();
}

// log of int_0^R r^{Q + alpha - 1} dr * omega.
double log_origin_weight(double R, const MorreySpaceSpec& s, const hgroup::GroupParams& gp) {
  const double k = gp.Q + s.alpha;
  return std::log(gp.omega_Q) + k * std::log(R) - std::log(k);
}

double shell_weight(double lo, double hi, double k) {
  return (std::pow(hi, k) - std::pow(lo, k)) / k;
}

// w_1(B)^{-p} I^{1/q} with its delta-method error from the sample covariance.
MorreyCell finish_cell(const CellGeometry& g, const mc::DirectionalSamples& s,
                       const MorreySpaceSpec& space) {
  MorreyCell cell{g.center_radius, g.direction, g.R, 0.0, 0.0, false};
  const double W = s.mean(0);
  const double I = s.mean(1);
  if (!(W > 0.0)) throw SamplingError("no direction reached " + describe(g));
  if (!(I > 0.0)) return cell;
  const double p = space.lambda + 1.0 / space.q;
  const double V = std::exp(-p * std::log(W) + std::log(I) / space.q);
  const double dW = -p * V / W;
  const double dI = V / (space.q * I);
  const double var = dW * dW * s.mean_covariance(0, 0) + dI * dI * s.mean_covariance(1, 1) +
                     2.0 * dW * dI * s.mean_covariance(0, 1);
  cell.value = V;
  cell.std_error = std::sqrt(std::max(var, 0.0));
  return cell;
}

MorreyEstimate reduce(std::vector<MorreyCell> cells) {
  MorreyEstimate e;
  bool first = true;
  for (const auto& c : cells) {
    if (first || c.value > e.value) {
      e.value = c.value;
      e.argmax_center_radius = c.center_radius;
      e.argmax_direction = c.direction;
      e.argmax_R = c.R;
      e.std_error = c.std_error;
      first = false;
    }
  }
  e.cells = std::move(cells);
  return e;
}

template <class CellFn>
MorreyEstimate run_cells(const BallGrid& grid, const hgroup::GroupParams& gp, CellFn&& fn) {
  grid.check(gp.n);
  const auto geometry = enumerate_cells(grid);
  std::vector<MorreyCell> cells(geometry.size());
  parallel_for(geometry.size(), [&](std::size_t i) {
    try {
      cells[i] = fn(geometry[i]);
    } catch (const DivergenceError& err) {
      throw DivergenceError(std::string(err.what()) + " in " + describe(geometry[i]));
    } catch (const ConvergenceError& err) {
      throw ConvergenceError(std::string(err.what()) + " in " + describe(geometry[i]));
    }
  });
  return reduce(std::move(cells));
}

// Relative half-width of the window skipped around each declared jump. The
// jump of f sits within rounding of the declared radius, so without the
// window a piece can hold an ulp-wide sliver of the other side that no
// relative quadrature target can resolve. The skipped mass is below
// 2e-12 of the local density.
constexpr double kJumpWindow = 1e-12;

double ray_integral(const quad::Integrand& g, double lo, double hi, const quad::QuadratureSpec& spec,
                    std::span<const double> jumps) {
  std::vector<double> cuts;
  for (double b : jumps) {
    if (b > lo && b < hi) {
      cuts.push_back(std::max(lo, b * (1.0 - kJumpWindow)));
      cuts.push_back(std::min(hi, b * (1.0 + kJumpWindow)));
    }
  }
  if (cuts.empty()) return quad::integrate_adaptive(g, lo, hi, spec);
  const quad::Integrand windowed = [&](double r) {
    for (double b : jumps) {
      if (std::abs(r - b) < kJumpWindow * b) return 0.0;
    }
    return g(r);
  };
  return quad::integrate_adaptive(windowed, lo, hi, spec, cuts);
}

HPoint center_point(const BallGrid& grid, const CellGeometry& g, int n) {
  if (g.direction < 0) return HPoint(n);
  return hgroup::dilate(g.center_radius, grid.center_directions[g.direction]);
}

}  // namespace

void MorreySpaceSpec::check(int Q) const {
  if (!std::isfinite(q) || !std::isfinite(lambda) || !std::isfinite(alpha) ||
      !std::isfinite(gamma_w)) {
    throw InvalidInput("Morrey space: exponents must be finite");
  }
  if (q < 1.0) throw InvalidInput("Morrey space: q must be >= 1");
  if (lambda < -1.0 / q || lambda >= 0.0) {
    throw InvalidInput("Morrey space: lambda must lie in [-1/q, 0)");
  }
  if (alpha <= -Q) throw InvalidInput("Morrey space: alpha must exceed -Q");
}

double MorreySpaceSpec::scaling_exponent(int Q) const {
  return Q * lambda - gamma_w / q + alpha * (lambda + 1.0 / q);
}

MorreySpaceSpec source_space(const ParamSet& p, int j) {
  if (j < 1 || j > p.m) throw InvalidInput("source_space: index out of range");
  const auto k = static_cast<std::size_t>(j - 1);
  return {p.q_list[k], p.lambda_list[k], p.alpha, p.q_list[k] * p.gamma_list[k] / p.q};
}

MorreySpaceSpec target_space(const ParamSet& p) {
  return {p.q, p.lambda, p.alpha, p.gamma_total()};
}

BallGrid BallGrid::default_grid(int n) {
  BallGrid g;
  g.center_radii = {0.0, 0.25, 1.0, 4.0};
  std::vector<double> e1(2 * n + 1, 0.0);
  std::vector<double> vert(2 * n + 1, 0.0);
  e1[0] = 1.0;
  vert.back() = 1.0;
  g.center_directions = {HPoint(n, e1), HPoint(n, vert)};
  for (int i = 0; i <= 16; ++i) g.radii.push_back(std::pow(10.0, -2.0 + i / 4.0));
  return g;
}

BallGrid BallGrid::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("BallGrid::scaled: factor must be positive");
  BallGrid g = *this;
  for (double& c : g.center_radii) c *= s;
  for (double& R : g.radii) R *= s;
  return g;
}

void BallGrid::check(int n) const {
  if (radii.empty()) throw InvalidInput("BallGrid: no radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) {
      throw InvalidInput("BallGrid: radii must be positive and finite");
    }
    if (i > 0 && radii[i] <= radii[i - 1]) throw InvalidInput("BallGrid: radii must be ascending");
  }
  if (std::find(center_radii.begin(), center_radii.end(), 0.0) == center_radii.end()) {
    throw InvalidInput("BallGrid: center_radii must include 0");
  }
  for (double c : center_radii) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidInput("BallGrid: center norms must be >= 0");
  }
  bool off_center = false;
  for (double c : center_radii) off_center = off_center || c > 0.0;
  if (off_center && center_directions.empty()) {
    throw InvalidInput("BallGrid: nonzero center norms need at least one direction");
  }
  for (const auto& d : center_directions) {
    if (d.n() != n) throw InvalidInput("BallGrid: direction has the wrong group dimension");
    if (std::abs(hgroup::hnorm(d) - 1.0) > 1e-12) {
      throw InvalidInput("BallGrid: directions must have unit homogeneous norm");
    }
  }
}

double MorreyEstimate::origin_value() const {
  double v = 0.0;
  for (const auto& c : cells) {
    if (c.direction < 0) v = std::max(v, c.value);
  }
  return v;
}

MorreyEstimate morrey_norm(const RadialProfile& f, const MorreySpaceSpec& space,
                           const BallGrid& grid, const hgroup::GroupParams& gp,
                           const mc::MCSpec& mc) {
  space.check(gp.Q);
  mc.check();
  const double p = space.lambda + 1.0 / space.q;
  const double kw = gp.Q + space.alpha;
  const double ki = space.gamma_w + gp.Q - 1.0;

  return run_cells(grid, gp, [&](const CellGeometry& g) {
    if (g.direction < 0) {
      MorreyCell cell{0.0, -1, g.R, 0.0, 0.0, true};
      if (f.is_zero()) return cell;
      const double I = gp.omega_Q * f.moment(0.0, g.R, space.q, ki);
      if (!std::isfinite(I)) throw DivergenceError("cell integral is infinite");
      if (I > 0.0) cell.value = std::exp(-p * log_origin_weight(g.R, space, gp) + std::log(I) / space.q);
      return cell;
    }
    if (f.is_zero()) return MorreyCell{g.center_radius, g.direction, g.R, 0.0, 0.0, false};
    const HPoint a = center_point(grid, g, gp.n);
    if (!use_rays(g.center_radius, g.R)) {
      const auto point_fn = [&](const HPoint& x, std::span<double> out) {
        const double r = hgroup::hnorm(x);
        out[0] = std::pow(r, space.alpha);
        const double v = f(r);
        out[1] = v == 0.0 ? 0.0 : std::pow(v, space.q) * std::pow(r, space.gamma_w);
      };
      return finish_cell(g, mc::uniform_ball_samples(2, point_fn, a, g.R, gp, mc, kPointStream),
                         space);
    }
    const auto ray_fn = [&](const HPoint&, std::span<const mc::Interval> ray, std::span<double> out) {
      for (const auto& iv : ray) {
        out[0] += shell_weight(iv.lo, iv.hi, kw);
        out[1] += f.moment(iv.lo, iv.hi, space.q, ki);
      }
    };
    const auto samples = mc::directional_ball_samples(2, ray_fn, a, g.R, gp, mc, kDirectionStream);
    return finish_cell(g, samples, space);
  });
}

MorreyEstimate morrey_norm_mc(const mc::PointFunction& f, const MorreySpaceSpec& space,
                              const BallGrid& grid, const hgroup::GroupParams& gp,
                              const mc::MCSpec& mc, std::span<const double> ray_breaks,
                              const quad::QuadratureSpec& ray_spec) {
  space.check(gp.Q);
  mc.check();
  ray_spec.check();
  const double kw = gp.Q + space.alpha;
  const double ki = space.gamma_w + gp.Q - 1.0;

  return run_cells(grid, gp, [&](const CellGeometry& g) {
    const HPoint a = center_point(grid, g, gp.n);
    if (!use_rays(g.center_radius, g.R)) {
      const auto point_fn = [&](const HPoint& x, std::span<double> out) {
        const double r = hgroup::hnorm(x);
        out[0] = std::pow(r, space.alpha);
        const double v = std::abs(f(x));
        out[1] = v == 0.0 ? 0.0 : std::pow(v, space.q) * std::pow(r, space.gamma_w);
      };
      return finish_cell(g, mc::uniform_ball_samples(2, point_fn, a, g.R, gp, mc, kPointStream),
                         space);
    }
    const auto ray_fn = [&](const HPoint& xi, std::span<const mc::Interval> ray,
                            std::span<double> out) {
      const auto integrand = [&](double r) {
        if (r <= 0.0) return 0.0;
        const double v = std::abs(f(hgroup::dilate(r, xi)));
        if (v == 0.0) return 0.0;
        return std::pow(v, space.q) * std::pow(r, ki);
      };
      for (const auto& iv : ray) {
        out[0] += shell_weight(iv.lo, iv.hi, kw);
        out[1] += ray_integral(integrand, iv.lo, iv.hi, ray_spec, ray_breaks);
      }
    };
    const auto samples = mc::directional_ball_samples(2, ray_fn, a, g.R, gp, mc, kDirectionStream);
    return finish_cell(g, samples, space);
  });
}

VerificationReport verify_dilation(const RadialProfile& f, double t, const MorreySpaceSpec& space,
                                   const BallGrid& grid, const hgroup::GroupParams& gp,
                                   const mc::MCSpec& mc, double tolerance) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidInput("verify_dilation: t must be positive");
  const auto start = std::chrono::steady_clock::now();
  const double sigma = space.scaling_exponent(gp.Q);
  const double factor = std::pow(t, sigma);
  const auto base = morrey_norm(f, space, grid, gp, mc);
  const auto moved = morrey_norm(f.dilated(t), space, grid.scaled(1.0 / t), gp, mc);

  double worst = 0.0;
  std::size_t worst_cell = 0;
  double origin_ratio = 0.0;
  for (std::size_t i = 0; i < base.cells.size(); ++i) {
    const double expected = factor * base.cells[i].value;
    const double got = moved.cells[i].value;
    const double err = expected == 0.0 ? std::abs(got) : std::abs(got - expected) / std::abs(expected);
    if (err > worst) {
      worst = err;
      worst_cell = i;
    }
    if (i == 0 && base.cells[i].value > 0.0) origin_ratio = got / base.cells[i].value;
  }

  auto r = make_report("verify_dilation", factor * base.value, moved.value, tolerance);
  r.rel_err = worst;
  r.passed = worst <= tolerance;
  r.seed = mc.seed;
  r.convention_note =
      "cell-by-cell comparison of the dilated profile on the grid scaled by 1/t against t^sigma_space "
      "times the original cells";
  r.extra = {{"t_radius", t},
             {"sigma_space", sigma},
             {"cells", base.cells.size()},
             {"worst_cell", worst_cell},
             {"first_origin_cell_ratio", origin_ratio},
             {"space", space}};
  r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  return r;
}

SharpnessResult sharpness(OperatorKind kind, const ParamSet& p, std::pair<double, double> truncation,
                          const BallGrid& grid, const quad::QuadratureSpec& spec,
                          const mc::MCSpec& mc, int knots_per_decade) {
  const auto v = validate(p, true);
  if (!v.ok()) throw InvalidInput("sharpness: " + v.summary());
  const auto [r_min, r_max] = truncation;
  if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max)) {
    throw InvalidInput("sharpness: truncation needs 0 < r_min < r_max < inf");
  }
  if (knots_per_decade < 1) throw InvalidInput("sharpness: knots_per_decade must be positive");
  grid.check(p.n);
  const auto gp = hgroup::ball_volume_constant(p.n);
  const auto e = derive_exponents(p);

  SharpnessResult out;
  out.constant = closed_form(kind, e, gp).value;

  std::vector<RadialProfile> fs;
  double source_product = 1.0;
  for (int j = 1; j <= p.m; ++j) {
    fs.push_back(extremizer_profile(e, j, truncation));
    const double norm = morrey_norm(fs.back(), source_space(p, j), grid, gp, mc).value;
    out.source_norms.push_back(norm);
    source_product *= norm;
  }

  // The table must cover every radius a grid ball reaches.
  const double reach =
      *std::max_element(grid.center_radii.begin(), grid.center_radii.end()) + grid.radii.back();
  const double lo = 1e-2 * std::min(r_min, grid.radii.front());
  const double hi = 1.05 * reach;
  const std::vector<double> extra{r_min, r_max};
  const auto knots = log_knots(lo, hi, knots_per_decade, extra);
  const auto Tf = operator_profile(kind, fs, knots, hi, gp, spec);
  out.target_norm = morrey_norm(Tf, target_space(p), grid, gp, mc).value;
  out.ratio = source_product > 0.0 ? out.target_norm / source_product : 0.0;
  return out;
}

VerificationReport sharpness_ratio(OperatorKind kind, const ParamSet& p,
                                   std::pair<double, double> truncation, const BallGrid& grid,
                                   const quad::QuadratureSpec& spec, const mc::MCSpec& mc,
                                   double tolerance) {
  const auto start = std::chrono::steady_clock::now();
  const auto s = sharpness(kind, p, truncation, grid, spec, mc);
  auto r = make_report("sharpness_ratio_" + to_string(kind), s.constant, s.ratio, tolerance,
                       VerificationReport::Mode::upper_relative);
  r.seed = mc.seed;
  r.convention_note =
      "ratio of two grid maxima, each a lower bound of its supremum; passes when ratio <= "
      "constant (1 + tolerance)";
  r.extra = {{"r_min", truncation.first},
             {"r_max", truncation.second},
             {"ratio", s.ratio},
             {"constant", s.constant},
             {"ratio_over_constant", s.ratio_over_constant()},
             {"target_norm", s.target_norm},
             {"source_norms", s.source_norms}};
  r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  return r;
}

bool RadializationContraction::holds(double k) const {
  return radialized <= direct.value + k * std::hypot(direct.std_error, radialized_se);
}

RadializationContraction radialization_contraction(const mc::PointFunction& f,
                                                   const MorreySpaceSpec& space,
                                                   const BallGrid& grid,
                                                   const hgroup::GroupParams& gp,
                                                   const mc::MCSpec& mc, double r_min,
                                                   double r_max, int knots_per_decade,
                                                   std::span<const double> ray_breaks) {
  RadializeOptions opt;
  opt.r_min = r_min;
  opt.r_max = r_max;
  opt.knots_per_decade = knots_per_decade;
  const auto g = radialize_with_error(f, gp, mc, opt);
  RadializationContraction c;
  c.radialized = morrey_norm(g.profile, space, grid, gp, mc).value;
  // Minkowski: the norm moves by at most the norm of the perturbation.
  c.radialized_se = morrey_norm(g.error_profile(), space, grid, gp, mc).value;
  c.direct = morrey_norm_mc(f, space, grid, gp, mc, ray_breaks);
  return c;
}

void to_json(nlohmann::json& j, const MorreySpaceSpec& s) {
  j = nlohmann::json{{"q", s.q}, {"lambda", s.lambda}, {"alpha", s.alpha}, {"gamma_w", s.gamma_w}};
}

void to_json(nlohmann::json& j, const BallGrid& g) {
  auto dirs = nlohmann::json::array();
  for (const auto& d : g.center_directions) {
    dirs.push_back(std::vector<double>(d.coords().begin(), d.coords().end()));
  }
  j = nlohmann::json{{"center_radii", g.center_radii}, {"center_directions", dirs}, {"radii", g.radii}};
}

void to_json(nlohmann::json& j, const MorreyCell& c) {
  j = nlohmann::json{{"center_radius", c.center_radius}, {"direction", c.direction}, {"R", c.R},
                     {"value", c.value},                 {"stderr", c.std_error},  {"exact", c.exact}};
}

void to_json(nlohmann::json& j, const MorreyEstimate& e) {
  j = nlohmann::json{{"value", e.value},
                     {"argmax_center_radius", e.argmax_center_radius},
                     {"argmax_direction", e.argmax_direction},
                     {"argmax_R", e.argmax_R},
                     {"stderr", e.std_error}};
}

}  // namespace hsharp
