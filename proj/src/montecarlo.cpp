#include "hsharp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hsharp/error.hpp"
#include "hsharp/parallel.hpp"

namespace hsharp::mc {
namespace {

using hgroup::HPoint;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct ShardRange {
  std::size_t begin;
  std::size_t end;
};

ShardRange shard_range(std::size_t total, int shards, int s) {
  const auto S = static_cast<std::size_t>(shards);
  return {total * s / S, total * (s + 1) / S};
}

// --- polynomial root isolation -------------------------------------------

using Poly = std::vector<double>;  // ascending coefficients

double horner(const Poly& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

Poly derivative(const Poly& c) {
  Poly d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(k * c[k]);
  return d;
}

Poly trimmed(Poly c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  return c;
}

using Eval = std::function<double(double)>;

double bisect(const Eval& f, double a, double b, double fa) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// Real roots of `eval` (a polynomial with coefficients c) in (lo, hi): the
// critical points split the range into monotone pieces, each holding at most
// one root.
std::vector<double> roots_in(const Poly& c, const Eval& eval, double lo, double hi) {
  const Poly p = trimmed(c);
  std::vector<double> roots;
  if (p.size() <= 1) return roots;
  if (p.size() == 2) {
    const double r = -p[0] / p[1];
    if (r > lo && r < hi) roots.push_back(r);
    return roots;
  }
  const Poly d = derivative(p);
  std::vector<double> pts{lo};
  for (double x : roots_in(d, [&d](double x) { return horner(d, x); }, lo, hi)) {
    if (x > pts.back()) pts.push_back(x);
  }
  pts.push_back(hi);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i];
    const double b = pts[i + 1];
    const double fa = eval(a);
    const double fb = eval(b);
    if (i > 0 && fa == 0.0) {
      roots.push_back(a);
      continue;
    }
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) roots.push_back(bisect(eval, a, b, fa));
  }
  return roots;
}

}  // namespace

void MCSpec::check() const {
  if (samples < 1000) throw InvalidInput("MCSpec: samples must be >= 1000");
  if (shards < 1) throw InvalidInput("MCSpec: shards must be >= 1");
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL))) {}

std::uint64_t CounterRng::next_u64() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t sub_stream(std::uint64_t stream, std::uint64_t index) {
  return splitmix64(stream ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

HPoint sample_unit_ball(int n, CounterRng& rng) {
  std::vector<double> c(static_cast<std::size_t>(2 * n + 1));
  for (;;) {
    for (double& v : c) v = rng.uniform(-1.0, 1.0);
    HPoint u(n, c);
    if (hgroup::hnorm(u) < 1.0) return u;
  }
}

HPoint sample_unit_sphere(int n, CounterRng& rng) {
  for (;;) {
    HPoint u = sample_unit_ball(n, rng);
    const double r = hgroup::hnorm(u);
    if (r > 1e-8) return hgroup::dilate(1.0 / r, u);
  }
}

MCResult mc_ball_integral(const PointFunction& f, const HPoint& center, double radius,
                          const hgroup::GroupParams& gp, const MCSpec& mc, std::uint64_t stream,
                          std::optional<double> singular_exponent) {
  mc.check();
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("mc_ball_integral: radius must be positive and finite");
  }
  if (center.n() != gp.n) throw InvalidInput("mc_ball_integral: center dimension mismatch");
  const int n = gp.n;
  const double Q = gp.Q;
  const double c_norm = hgroup::hnorm(center);
  const bool importance = singular_exponent.has_value() && c_norm < radius;
  double beta = 0.0;
  if (importance) {
    beta = *singular_exponent;
    if (!(beta > -Q) || !(beta < 0.0)) {
      throw InvalidInput("mc_ball_integral: singular exponent must lie in (-Q, 0)");
    }
  }
  const double outer = c_norm + radius;
  const double box_volume = std::pow(2.0 * radius, 2 * n) * 2.0 * radius * radius;

  const auto N = static_cast<std::size_t>(mc.samples);
  std::vector<double> values(N, 0.0);
  std::vector<char> accepted(N, 0);
  parallel_for(static_cast<std::size_t>(mc.shards), [&](std::size_t s) {
    CounterRng rng(mc.seed, sub_stream(stream, s));
    const auto range = shard_range(N, mc.shards, static_cast<int>(s));
    std::vector<double> c(static_cast<std::size_t>(2 * n + 1));
    for (std::size_t i = range.begin; i < range.end; ++i) {
      if (importance) {
        // r has density (Q + beta) r^{Q+beta-1} / outer^{Q+beta} on (0, outer).
        const double r = outer * std::pow(rng.uniform(), 1.0 / (Q + beta));
        const HPoint x = hgroup::dilate(r, sample_unit_sphere(n, rng));
        if (hgroup::hdist(x, center) >= radius) continue;
        const double pdf = (Q + beta) * std::pow(r, beta) / (gp.omega_Q * std::pow(outer, Q + beta));
        values[i] = f(x) / pdf;
        accepted[i] = 1;
      } else {
        for (std::size_t k = 0; k + 1 < c.size(); ++k) c[k] = rng.uniform(-radius, radius);
        c.back() = rng.uniform(-radius * radius, radius * radius);
        const HPoint u(n, c);
        if (hgroup::hnorm(u) >= radius) continue;
        values[i] = f(hgroup::group_mul(center, u)) * box_volume;
        accepted[i] = 1;
      }
    }
  });

  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    hits += accepted[i];
    sum += values[i];
  }
  if (static_cast<double>(hits) < 1e-4 * static_cast<double>(N)) {
    throw SamplingError("mc_ball_integral: acceptance ratio below 1e-4");
  }
  const double mean = sum / static_cast<double>(N);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(N - 1);
  if (!std::isfinite(mean) || !std::isfinite(var)) {
    throw SamplingError("mc_ball_integral: non-finite sample values");
  }
  return {mean, std::sqrt(var / static_cast<double>(N))};
}

std::vector<Interval> ray_ball_intervals(const HPoint& xi, const HPoint& center, double radius) {
  if (xi.n() != center.n()) throw InvalidInput("ray_ball_intervals: dimension mismatch");
  const auto n = static_cast<std::size_t>(xi.n());
  double A = 0.0, B = 0.0, C = 0.0, E = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    A += xi[i] * xi[i];
    B += xi[i] * center[i];
    C += center[i] * center[i];
  }
  for (std::size_t j = 0; j < n; ++j) E += center[j] * xi[n + j] - xi[j] * center[n + j];
  E *= 2.0;
  const double T = xi[2 * n];
  const double at = center[2 * n];
  const double R4 = radius * radius * radius * radius;

  // |center^{-1} delta_r xi|_h^4 - R^4 = (A r^2 - 2B r + C)^2 + (T r^2 + E r - at)^2 - R^4.
  // Its constant term |center|_h^4 - R^4 vanishes when the origin lies on the
  // sphere; a rounding-level value there is snapped to zero, since a spurious
  // root near r = 0 is not dilation covariant and singular integrands feel it.
  const double raw0 = C * C + at * at - R4;
  const bool origin_on_sphere =
      std::abs(raw0) <= 64.0 * std::numeric_limits<double>::epsilon() * (C * C + at * at + R4);
  const double shift = origin_on_sphere ? raw0 : 0.0;
  auto g = [&](double r) {
    const double h = (A * r - 2.0 * B) * r + C;
    const double v = (T * r + E) * r - at;
    return h * h + v * v - R4 - shift;
  };
  const Poly coeffs{raw0 - shift,
                    -4.0 * B * C - 2.0 * E * at,
                    4.0 * B * B + 2.0 * A * C + E * E - 2.0 * T * at,
                    -4.0 * A * B + 2.0 * T * E,
                    A * A + T * T};

  const double a_norm = hgroup::hnorm(center);
  const double lo = origin_on_sphere ? 0.0 : std::max(0.0, a_norm - radius);
  const double hi = a_norm + radius;
  std::vector<double> pts{lo};
  for (double r : roots_in(coeffs, g, lo, hi)) {
    if (r > pts.back()) pts.push_back(r);
  }
  pts.push_back(hi);

  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] > pts[i])) continue;
    if (g(0.5 * (pts[i] + pts[i + 1])) < 0.0) {
      if (!out.empty() && out.back().hi == pts[i]) {
        out.back().hi = pts[i + 1];
      } else {
        out.push_back({pts[i], pts[i + 1]});
      }
    }
  }
  return out;
}

double DirectionalSamples::mean(int k) const {
  const std::size_t N = rows();
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += values[i * width + k];
  return N == 0 ? 0.0 : s / static_cast<double>(N);
}

double DirectionalSamples::mean_covariance(int k, int l) const {
  const std::size_t N = rows();
  if (N < 2) return 0.0;
  const double mk = mean(k);
  const double ml = mean(l);
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    s += (values[i * width + k] - mk) * (values[i * width + l] - ml);
  }
  return s / static_cast<double>(N - 1) / static_cast<double>(N);
}

MCResult DirectionalSamples::result(int k) const {
  return {mean(k), std::sqrt(std::max(0.0, mean_covariance(k, k)))};
}

DirectionalSamples directional_ball_samples(int width, const RayFunction& ray_fn,
                                            const HPoint& center, double radius,
                                            const hgroup::GroupParams& gp, const MCSpec& mc,
                                            std::uint64_t stream) {
  mc.check();
  if (width < 1) throw InvalidInput("directional_ball_samples: width must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("directional_ball_samples: radius must be positive and finite");
  }
  const auto N = static_cast<std::size_t>(mc.samples);
  DirectionalSamples out;
  out.width = width;
  out.values.assign(N * width, 0.0);
  parallel_for(static_cast<std::size_t>(mc.shards), [&](std::size_t s) {
    CounterRng rng(mc.seed, sub_stream(stream, s));
    const auto range = shard_range(N, mc.shards, static_cast<int>(s));
    for (std::size_t i = range.begin; i < range.end; ++i) {
      const HPoint xi = sample_unit_sphere(gp.n, rng);
      const auto ray = ray_ball_intervals(xi, center, radius);
      std::span<double> row(out.values.data() + i * width, width);
      if (!ray.empty()) ray_fn(xi, ray, row);
      for (double& v : row) {
        v *= gp.omega_Q;
        if (!std::isfinite(v)) throw DivergenceError("directional ball integral is not finite");
      }
    }
  });
  return out;
}

DirectionalSamples uniform_ball_samples(int width, const PointRowFunction& point_fn,
                                        const HPoint& center, double radius,
                                        const hgroup::GroupParams& gp, const MCSpec& mc,
                                        std::uint64_t stream) {
  mc.check();
  if (width < 1) throw InvalidInput("uniform_ball_samples: width must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("uniform_ball_samples: radius must be positive and finite");
  }
  const auto N = static_cast<std::size_t>(mc.samples);
  const double volume = gp.Omega_Q * std::pow(radius, gp.Q);
  DirectionalSamples out;
  out.width = width;
  out.values.assign(N * width, 0.0);
  parallel_for(static_cast<std::size_t>(mc.shards), [&](std::size_t s) {
    CounterRng rng(mc.seed, sub_stream(stream, s));
    const auto range = shard_range(N, mc.shards, static_cast<int>(s));
    for (std::size_t i = range.begin; i < range.end; ++i) {
      const HPoint x = hgroup::group_mul(center, hgroup::dilate(radius, sample_unit_ball(gp.n, rng)));
      std::span<double> row(out.values.data() + i * width, width);
      point_fn(x, row);
      for (double& v : row) {
        v *= volume;
        if (!std::isfinite(v)) throw DivergenceError("ball integral is not finite");
      }
    }
  });
  return out;
}

void to_json(nlohmann::json& j, const MCSpec& mc) {
  j = nlohmann::json{{"samples", mc.samples}, {"seed", mc.seed}, {"shards", mc.shards}};
}

}  // namespace hsharp::mc
