#include "hsharp/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hsharp/error.hpp"
#include "hsharp/parallel.hpp"

namespace hsharp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kJumpWindow = 1e-12;

void check_inputs(std::size_t m, const hgroup::GroupParams& gp) {
  if (m == 0) throw InvalidInput("operator needs at least one function");
  if (gp.Q != 2 * gp.n + 2) throw InvalidInput("inconsistent GroupParams");
}

// Log-radius range explored by the operator quadratures: every weight
// e^{Q u} in an m-fold product stays representable.
double log_cap(std::size_t m, int Q) { return 600.0 / (static_cast<double>(m) * Q); }

std::vector<double> log_breakpoints(std::span<const RadialProfile> profiles) {
  std::vector<double> out;
  for (const auto& f : profiles) {
    for (double r : f.breakpoints()) out.push_back(std::log(r));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Nested radial quadrature for kernels of the form K(|x|^Q, |y_1|^Q, ..., |y_m|^Q):
//   value(k, state) = int omega_Q e^{Q u} g_k(u) value(k+1, combine(state, Q u)) du,
//   value(m, state) = exp(-m * state),
// where state is log max (HLP) or log sum (Hilbert) of the Q-th powers seen
// so far, and g_k(u) = f_k(e^u) along whatever ray is being integrated.
// Level k is confined to |u| <= (k + 1) * 150 / Q, so e^{-m state} stays
// representable for m <= 2.
class NestedKernel {
 public:
  using LogDensity = std::function<double(std::size_t k, double u)>;

  // `jumps` are log radii where the densities may jump by an amount only
  // known up to rounding; a window of half-width kJumpWindow around each is
  // skipped, so that no piece holds an unresolvable sliver.
  NestedKernel(OperatorKind kind, std::size_t m, const hgroup::GroupParams& gp,
               const quad::QuadratureSpec& spec, LogDensity log_density,
               std::vector<std::vector<double>> breaks, std::vector<double> jumps = {})
      : kind_(kind),
        m_(m),
        Q_(gp.Q),
        log_omega_(std::log(gp.omega_Q)),
        spec_(spec),
        log_density_(std::move(log_density)),
        breaks_(std::move(breaks)),
        jumps_(std::move(jumps)),
        cap_(150.0 / gp.Q) {
    for (auto& b : breaks_) {
      for (double j : jumps_) {
        b.push_back(j - kJumpWindow);
        b.push_back(j + kJumpWindow);
      }
    }
  }

  double value(std::size_t k, double state) const {
    if (k == m_) return std::exp(-static_cast<double>(m_) * state);
    std::vector<double> cuts = breaks_[k];
    // Where |y_k|^Q overtakes the kernel's current scale. It is only a hint,
    // so it yields to a nearby profile breakpoint (a real discontinuity).
    const double scale = state / Q_;
    const bool near_break = std::any_of(cuts.begin(), cuts.end(), [scale](double b) {
      return std::abs(b - scale) <= 1e-9 * std::max(1.0, std::abs(b));
    });
    if (!near_break) cuts.push_back(scale);
    quad::Integrand g = [&, k, state](double u) {
      for (double j : jumps_) {
        if (std::abs(u - j) < kJumpWindow) return 0.0;
      }
      const double ld = log_density_(k, u);
      if (ld == -kInf) return 0.0;
      const double qu = Q_ * u;
      const double next = kind_ == OperatorKind::hlp ? std::max(state, qu) : log_add(state, qu);
      const double inner = value(k + 1, next);
      if (inner == 0.0) return 0.0;
      return std::exp(log_omega_ + ld + qu + std::log(inner));
    };
    // Deeper levels get a wider range: their mass sits near state / Q, which
    // can reach the cap of the level above.
    return quad::integrate_capped(g, -kInf, kInf, cap_ * static_cast<double>(k + 1), spec_, cuts);
  }

 private:
  OperatorKind kind_;
  std::size_t m_;
  double Q_;
  double log_omega_;
  quad::QuadratureSpec spec_;
  LogDensity log_density_;
  std::vector<std::vector<double>> breaks_;
  std::vector<double> jumps_;
  double cap_;
};

std::vector<double> hlp_table(std::span<const RadialProfile> profiles,
                              std::span<const double> radii, const hgroup::GroupParams& gp,
                              const quad::QuadratureSpec& spec) {
  const std::size_t m = profiles.size();
  const double Q = gp.Q;
  const double log_omega = std::log(gp.omega_Q);
  std::vector<CumulativeMass> masses;
  for (const auto& f : profiles) masses.emplace_back(f, gp.Q);

  auto log_F = [&](std::size_t j, double u) { return log_omega + masses[j].log_mass_at_log(u); };
  quad::Integrand tail = [&](double u) {
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double lf = profiles[k].log_value_at_log(u);
      if (lf == -kInf) continue;
      double lv = log_omega + lf + Q * u - static_cast<double>(m) * Q * u;
      for (std::size_t j = 0; j < m && lv != -kInf; ++j) {
        if (j != k) lv += log_F(j, u);
      }
      if (lv == kInf) throw DivergenceError("operator integral diverges: infinite ball mass");
      total += std::exp(lv);
    }
    return total;
  };

  const auto breaks = log_breakpoints(profiles);
  const double cap = log_cap(m, gp.Q);
  double u_end = -kInf;
  for (const auto& f : profiles) u_end = std::max(u_end, std::log(f.support_hi()));

  const std::size_t N = radii.size();
  std::vector<double> u(N);
  for (std::size_t i = 0; i < N; ++i) u[i] = std::log(radii[i]);

  // Tail integrals over consecutive gaps, then accumulated from the right.
  std::vector<double> piece(N, 0.0);
  parallel_for(N, [&](std::size_t i) {
    const double lo = u[i];
    const double hi = i + 1 < N ? u[i + 1] : kInf;
    const double top = std::min(hi, u_end);
    if (!(lo < top)) return;
    piece[i] = quad::integrate_capped(tail, lo, top, cap, spec, breaks);
  });

  std::vector<double> out(N, 0.0);
  double acc = 0.0;
  for (std::size_t i = N; i-- > 0;) {
    acc += piece[i];
    double lh = -static_cast<double>(m) * Q * u[i];
    for (std::size_t j = 0; j < m && lh != -kInf; ++j) lh += log_F(j, u[i]);
    if (lh == kInf) throw DivergenceError("operator integral diverges: infinite ball mass");
    out[i] = std::exp(lh) + acc;
    if (!std::isfinite(out[i])) throw DivergenceError("operator value is not finite");
  }
  return out;
}

std::vector<double> hilbert_table(std::span<const RadialProfile> profiles,
                                  std::span<const double> radii, const hgroup::GroupParams& gp,
                                  const quad::QuadratureSpec& spec) {
  const std::size_t m = profiles.size();
  std::vector<std::vector<double>> breaks;
  for (const auto& f : profiles) {
    std::vector<double> b;
    for (double r : f.breakpoints()) b.push_back(std::log(r));
    breaks.push_back(std::move(b));
  }
  NestedKernel kernel(
      OperatorKind::hilbert, m, gp, spec,
      [&profiles](std::size_t k, double u) { return profiles[k].log_value_at_log(u); },
      std::move(breaks));
  std::vector<double> out(radii.size(), 0.0);
  parallel_for(radii.size(), [&](std::size_t i) {
    out[i] = kernel.value(0, gp.Q * std::log(radii[i]));
    if (!std::isfinite(out[i])) throw DivergenceError("operator value is not finite");
  });
  return out;
}

}  // namespace

std::vector<double> apply_table(OperatorKind kind, std::span<const RadialProfile> profiles,
                                std::span<const double> radii, const hgroup::GroupParams& gp,
                                const quad::QuadratureSpec& spec) {
  check_inputs(profiles.size(), gp);
  spec.check();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i]) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw InvalidInput("apply: radii must be positive, finite and strictly increasing");
    }
  }
  for (const auto& f : profiles) {
    if (f.is_zero()) return std::vector<double>(radii.size(), 0.0);
  }
  return kind == OperatorKind::hlp ? hlp_table(profiles, radii, gp, spec)
                                   : hilbert_table(profiles, radii, gp, spec);
}

double apply(OperatorKind kind, std::span<const RadialProfile> profiles, double x_radius,
             const hgroup::GroupParams& gp, const quad::QuadratureSpec& spec) {
  const double r[] = {x_radius};
  return apply_table(kind, profiles, r, gp, spec).front();
}

std::vector<double> log_knots(double lo, double hi, int per_decade, std::span<const double> extra) {
  if (!(lo > 0.0) || !(hi > lo) || per_decade < 1) {
    throw InvalidInput("log_knots: need 0 < lo < hi and per_decade >= 1");
  }
  const double decades = std::log10(hi / lo);
  const int n = std::max(1, static_cast<int>(std::ceil(decades * per_decade)));
  std::vector<double> k;
  for (int i = 0; i <= n; ++i) k.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n));
  k.front() = lo;
  k.back() = hi;
  for (double x : extra) {
    if (x > lo && x < hi) k.push_back(x);
  }
  std::sort(k.begin(), k.end());
  // Drop near-duplicates so log-log slopes stay well conditioned.
  std::vector<double> out;
  for (double x : k) {
    if (out.empty() || x > out.back() * (1.0 + 1e-9)) out.push_back(x);
  }
  return out;
}

RadialProfile operator_profile(OperatorKind kind, std::span<const RadialProfile> profiles,
                               std::span<const double> knots, double hi_cutoff,
                               const hgroup::GroupParams& gp, const quad::QuadratureSpec& spec) {
  std::vector<double> k(knots.begin(), knots.end());
  std::vector<double> v = apply_table(kind, profiles, k, gp, spec);
  return RadialProfile::tabulated(std::move(k), std::move(v), {0.0, hi_cutoff});
}

RadialProfile extremizer_profile(const ExponentSet& e, int j,
                                 std::optional<std::pair<double, double>> truncation) {
  if (j < 1 || j > e.m()) {
    throw InvalidInput("extremizer_profile: index " + std::to_string(j) + " outside 1.." +
                       std::to_string(e.m()));
  }
  const double s = e.sigma_list[j - 1];
  if (truncation) return RadialProfile::truncated_power(s, truncation->first, truncation->second);
  return RadialProfile::power(s);
}

RadialProfile RadializedProfile::error_profile() const {
  return RadialProfile::tabulated(profile.knots(), std_errors, profile.extrapolation());
}

RadializedProfile radialize_with_error(const mc::PointFunction& f, const hgroup::GroupParams& gp,
                                       const mc::MCSpec& mc, const RadializeOptions& options) {
  mc.check();
  const auto knots = log_knots(options.r_min, options.r_max, options.knots_per_decade);
  const std::size_t K = knots.size();
  const auto N = static_cast<std::size_t>(mc.samples);
  std::vector<double> samples(N * K, 0.0);
  parallel_for(static_cast<std::size_t>(mc.shards), [&](std::size_t s) {
    mc::CounterRng rng(mc.seed, mc::sub_stream(options.stream, s));
    const std::size_t begin = N * s / mc.shards;
    const std::size_t end = N * (s + 1) / mc.shards;
    for (std::size_t i = begin; i < end; ++i) {
      const auto xi = mc::sample_unit_sphere(gp.n, rng);
      for (std::size_t k = 0; k < K; ++k) {
        const double v = f(hgroup::dilate(knots[k], xi));
        if (!std::isfinite(v) || v < 0.0) {
          throw SamplingError("radialize: f must be finite and nonnegative on the sphere samples");
        }
        samples[i * K + k] = v;
      }
    }
  });
  std::vector<double> mean(K, 0.0);
  std::vector<double> se(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += samples[i * K + k];
    mean[k] = s / static_cast<double>(N);
    double ss = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double d = samples[i * K + k] - mean[k];
      ss += d * d;
    }
    se[k] = std::sqrt(ss / static_cast<double>(N - 1) / static_cast<double>(N));
  }
  RadializedProfile out;
  out.profile = RadialProfile::tabulated(knots, std::move(mean), options.extrapolation);
  out.std_errors = std::move(se);
  return out;
}

RadialProfile radialize(const mc::PointFunction& f, const hgroup::GroupParams& gp,
                        const mc::MCSpec& mc, const RadializeOptions& options) {
  RadializedProfile r = radialize_with_error(f, gp, mc, options);
  if (r.profile.is_zero()) return RadialProfile::zero();
  return r.profile;
}

mc::MCResult apply_mc(OperatorKind kind, std::span<const mc::PointFunction> fs, double x_radius,
                      const hgroup::GroupParams& gp, const mc::MCSpec& mc, std::uint64_t stream,
                      const quad::QuadratureSpec& spec, std::span<const double> ray_breaks) {
  const std::size_t m = fs.size();
  check_inputs(m, gp);
  mc.check();
  if (m > 2) throw InvalidInput("apply_mc supports m <= 2");
  if (!(x_radius > 0.0)) throw InvalidInput("apply_mc: x_radius must be positive");
  const auto N = static_cast<std::size_t>(mc.samples);
  std::vector<double> values(N, 0.0);
  const double state0 = gp.Q * std::log(x_radius);
  std::vector<double> log_breaks;
  for (double b : ray_breaks) {
    if (b > 0.0 && std::isfinite(b)) log_breaks.push_back(std::log(b));
  }
  parallel_for(static_cast<std::size_t>(mc.shards), [&](std::size_t s) {
    mc::CounterRng rng(mc.seed, mc::sub_stream(stream, s));
    const std::size_t begin = N * s / mc.shards;
    const std::size_t end = N * (s + 1) / mc.shards;
    for (std::size_t i = begin; i < end; ++i) {
      std::vector<hgroup::HPoint> xi;
      for (std::size_t j = 0; j < m; ++j) xi.push_back(mc::sample_unit_sphere(gp.n, rng));
      NestedKernel kernel(
          kind, m, gp, spec,
          [&](std::size_t k, double u) {
            const double v = fs[k](hgroup::dilate(std::exp(u), xi[k]));
            return v > 0.0 ? std::log(v) : -kInf;
          },
          std::vector<std::vector<double>>(m), log_breaks);
      values[i] = kernel.value(0, state0);
    }
  });
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(N);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(N - 1) / static_cast<double>(N))};
}

double NeutralityCheck::combined_se() const {
  return std::hypot(radialized_se, direct.std_error);
}

double NeutralityCheck::z_score() const {
  const double se = combined_se();
  const double d = std::abs(radialized - direct.estimate);
  return se > 0.0 ? d / se : (d == 0.0 ? 0.0 : kInf);
}

NeutralityCheck radialization_neutrality(OperatorKind kind, std::span<const mc::PointFunction> fs,
                                         double x_radius, const hgroup::GroupParams& gp,
                                         const mc::MCSpec& mc, const RadializeOptions& options,
                                         std::span<const double> ray_breaks) {
  const std::size_t m = fs.size();
  std::vector<RadialProfile> g;
  std::vector<RadialProfile> err;
  for (std::size_t j = 0; j < m; ++j) {
    RadializeOptions o = options;
    o.stream = mc::sub_stream(options.stream, j);
    RadializedProfile r = radialize_with_error(fs[j], gp, mc, o);
    err.push_back(r.error_profile());
    g.push_back(r.profile.is_zero() ? RadialProfile::zero() : r.profile);
  }
  NeutralityCheck out;
  out.radialized = apply(kind, g, x_radius, gp);
  // The knot errors share their directions, so they are summed linearly,
  // which bounds the propagated standard error from above.
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<RadialProfile> h = g;
    h[j] = err[j];
    out.radialized_se += apply(kind, h, x_radius, gp);
  }
  quad::QuadratureSpec ray_spec;
  ray_spec.rel_target = 1e-9;
  out.direct = apply_mc(kind, fs, x_radius, gp, mc, mc::sub_stream(options.stream, 0xd1ec7), ray_spec,
                        ray_breaks);
  return out;
}

}  // namespace hsharp
