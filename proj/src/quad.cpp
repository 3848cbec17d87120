#include "hsharp/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "hsharp/error.hpp"

namespace hsharp::quad {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfPi = std::numbers::pi / 2.0;

// Terms below this fraction of the running sum end a tail.
constexpr double kNegligible = 1e-20;
// A tail cut off by the representable range must have shrunk below this.
// On a finite interval the cut comes from floating-point resolution next to a
// nonzero endpoint, where integrable singularities decay slowly, so a
// non-integrable one is recognised by a much larger last term.
constexpr double kDivergenceThreshold = 1e-6;
constexpr double kFiniteDivergenceThreshold = 1e-3;
constexpr int kMaxLevel = 11;
constexpr int kMinLevel = 3;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Double-exponential rules.

class DeTransform {
 public:
  enum class Kind { finite, right, left, line };

  static DeTransform finite(double a, double b) { return {Kind::finite, a, b, kInf}; }
  static DeTransform right(double a, double limit = kInf) { return {Kind::right, a, 0.0, limit}; }
  static DeTransform left(double b, double limit = kInf) { return {Kind::left, 0.0, b, limit}; }
  static DeTransform line(double c, double limit = kInf) { return {Kind::line, c, 0.0, limit}; }

  bool finite_range() const { return kind_ == Kind::finite; }

  // Node and weight at parameter t; false outside the representable range.
  bool map(double t, double& x, double& w) const {
    const double u = kHalfPi * std::sinh(t);
    const double dudt = kHalfPi * std::cosh(t);
    switch (kind_) {
      case Kind::finite: {
        const double e = std::exp(-2.0 * std::abs(u));
        const double width = b_ - a_;
        const double delta = e / (1.0 + e);
        const double offset = width * delta;
        if (!(offset > 0.0)) return false;
        x = t >= 0.0 ? b_ - offset : a_ + offset;
        // A node closer to an endpoint than its floating-point spacing rounds
        // onto it; keep it one ulp inside so the endpoint mass is not lost.
        if (x <= a_) x = std::nextafter(a_, b_);
        if (x >= b_) x = std::nextafter(b_, a_);
        w = width * 2.0 * dudt * e / ((1.0 + e) * (1.0 + e));
        return w > 0.0;
      }
      case Kind::right:
      case Kind::left: {
        const double ex = std::exp(u);
        if (!std::isfinite(ex) || ex > limit_) return false;
        x = kind_ == Kind::right ? a_ + ex : b_ - ex;
        w = ex * dudt;
        return std::isfinite(x) && x != (kind_ == Kind::right ? a_ : b_) && w > 0.0;
      }
      case Kind::line: {
        const double s = std::sinh(u);
        if (!std::isfinite(s) || std::abs(s) > limit_) return false;
        x = a_ + s;
        w = std::cosh(u) * dudt;
        return std::isfinite(x) && std::isfinite(w);
      }
    }
    return false;
  }

 private:
  DeTransform(Kind k, double a, double b, double limit) : kind_(k), a_(a), b_(b), limit_(limit) {}
  Kind kind_;
  double a_;
  double b_;
  double limit_;
};

struct TailState {
  double t_end = 0.0;
  bool range_cut = false;
  double last_term = 0.0;
};

double eval_checked(const Integrand& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw DivergenceError("integrand is not finite at x = " + fmt(x));
  }
  return v;
}

struct DeAttempt {
  double estimate = 0.0;
  double magnitude = 0.0;  // same rule applied to |f|
  bool converged = false;
};

// Successive halvings of the step until two levels agree to rel_target (or to
// abs_target); `converged` is false if kMaxLevel is reached first.
DeAttempt de_attempt(const Integrand& f, const DeTransform& tr, double rel_target,
                     double abs_target) {
  constexpr double h0 = 1.0;
  double raw = 0.0;
  double raw_abs = 0.0;

  double x = 0.0;
  double w = 0.0;
  if (tr.map(0.0, x, w)) {
    const double term = eval_checked(f, x) * w;
    raw += term;
    raw_abs += std::abs(term);
  }

  std::array<TailState, 2> tails;
  for (int d = 0; d < 2; ++d) {
    const double dir = d == 0 ? 1.0 : -1.0;
    int quiet = 0;
    for (int k = 1;; ++k) {
      const double t = dir * k * h0;
      if (!tr.map(t, x, w)) {
        tails[d].range_cut = true;
        tails[d].t_end = k * h0;
        break;
      }
      const double term = eval_checked(f, x) * w;
      raw += term;
      raw_abs += std::abs(term);
      tails[d].last_term = term;
      if (raw_abs > 0.0 && std::abs(term) <= kNegligible * raw_abs) {
        if (++quiet >= 2) {
          tails[d].t_end = k * h0;
          break;
        }
      } else {
        quiet = 0;
      }
    }
  }
  for (const auto& tail : tails) {
    const double threshold =
        tr.finite_range() ? kFiniteDivergenceThreshold : kDivergenceThreshold;
    if (tail.range_cut && std::abs(tail.last_term) > threshold * raw_abs) {
      throw DivergenceError("integrand tail does not decay (last term " +
                            fmt(tail.last_term) + " vs total " + fmt(raw_abs) + ")");
    }
  }

  double estimate = h0 * raw;
  double h = h0;
  for (int level = 1; level <= kMaxLevel; ++level) {
    h *= 0.5;
    for (int d = 0; d < 2; ++d) {
      const double dir = d == 0 ? 1.0 : -1.0;
      for (int k = 1;; k += 2) {
        const double t = k * h;
        if (t >= tails[d].t_end) break;
        if (!tr.map(dir * t, x, w)) continue;
        const double term = eval_checked(f, x) * w;
        raw += term;
        raw_abs += std::abs(term);
      }
    }
    const double next = h * raw;
    const double diff = std::abs(next - estimate);
    estimate = next;
    if (level >= kMinLevel && (diff <= rel_target * std::abs(next) ||
                               diff <= rel_target * h * raw_abs || diff <= abs_target)) {
      return {estimate, h * raw_abs, true};
    }
  }
  return {estimate, h * raw_abs, false};
}

double de_integrate(const Integrand& f, const DeTransform& tr, double rel_target) {
  const auto r = de_attempt(f, tr, rel_target, 0.0);
  if (!r.converged) {
    throw ConvergenceError("double-exponential quadrature did not reach rel_target " +
                           fmt(rel_target) + " (estimate " + fmt(r.estimate) + ")");
  }
  return r.estimate;
}

// Bisection depth limit of integrate_adaptive; 2^-60 of a ray interval is far
// below the resolution of its endpoints.
constexpr int kMaxBisections = 60;

// Bisects [a, b] until each piece meets its share of the absolute target
// abs_per_length * (b - a).
double de_bisect(const Integrand& f, double a, double b, double rel_target, double abs_per_length,
                 int depth) {
  const auto r = de_attempt(f, DeTransform::finite(a, b), rel_target, abs_per_length * (b - a));
  if (r.converged) return r.estimate;
  const double mid = 0.5 * (a + b);
  if (depth >= kMaxBisections || !(mid > a && mid < b)) {
    throw ConvergenceError("adaptive quadrature did not reach rel_target " + fmt(rel_target) +
                           " near x = " + fmt(mid));
  }
  return de_bisect(f, a, mid, rel_target, abs_per_length, depth + 1) +
         de_bisect(f, mid, b, rel_target, abs_per_length, depth + 1);
}

// ---------------------------------------------------------------------------
// Composite Gauss-Legendre.

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

double gl_panel(const Integrand& g, double lo, double hi, const GaussRule& rule) {
  const double c = 0.5 * (lo + hi);
  const double d = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * eval_checked(g, c + d * rule.nodes[i]);
  }
  return s * d;
}

// int over [min(from, to), max(from, to)] on panels geometrically graded
// toward `from`; checks that the contributions shrink toward that end.
double gl_graded(const Integrand& g, double from, double to, int panels, const GaussRule& rule) {
  double total = 0.0;
  double prev = 0.0;
  double last = 0.0;
  const double len = to - from;
  for (int k = 0; k < panels; ++k) {
    const double outer = from + len * std::ldexp(1.0, -k);
    const double inner = k + 1 < panels ? from + len * std::ldexp(1.0, -k - 1) : from;
    const double c = gl_panel(g, std::min(inner, outer), std::max(inner, outer), rule);
    total += c;
    prev = last;
    last = c;
  }
  if (panels >= 3 && std::abs(last) >= 0.9999 * std::abs(prev) &&
      std::abs(last) > 1e-9 * std::abs(total)) {
    throw DivergenceError("panel contributions do not shrink toward x = " + fmt(from));
  }
  return total;
}

double gl_finite(const Integrand& f, double a, double b, const QuadratureSpec& spec,
                 const GaussRule& rule) {
  const double c = 0.5 * (a + b);
  const int p = std::max(1, spec.panels);
  return gl_graded(f, a, c, p, rule) + gl_graded(f, b, c, p, rule);
}

// int_a^inf f by a map of [0, 1) onto [a, inf), graded toward both ends of [0, 1).
double gl_right(const Integrand& f, double a, double sign, const QuadratureSpec& spec,
                const GaussRule& rule) {
  const bool rational = spec.infinity_transform == InfinityTransform::rational_map;
  Integrand g = [&](double t) {
    const double s = 1.0 - t;
    const double r = rational ? t / s : -std::log(s);
    const double dr = rational ? 1.0 / (s * s) : 1.0 / s;
    const double v = f(a + sign * r);
    return v == 0.0 ? 0.0 : v * dr;
  };
  const int p = std::max(1, spec.panels);
  return gl_graded(g, 0.0, 0.5, p, rule) + gl_graded(g, 1.0, 0.5, p, rule);
}

double integrate_piece(const Integrand& f, double a, double b, const QuadratureSpec& spec,
                       const GaussRule* rule) {
  if (a == b) return 0.0;
  const bool a_inf = std::isinf(a);
  const bool b_inf = std::isinf(b);
  if (spec.scheme == Scheme::double_exponential) {
    if (!a_inf && !b_inf) return de_integrate(f, DeTransform::finite(a, b), spec.rel_target);
    if (!a_inf) return de_integrate(f, DeTransform::right(a), spec.rel_target);
    if (!b_inf) return de_integrate(f, DeTransform::left(b), spec.rel_target);
    return de_integrate(f, DeTransform::line(0.0), spec.rel_target);
  }
  if (!a_inf && !b_inf) return gl_finite(f, a, b, spec, *rule);
  if (!a_inf) return gl_right(f, a, 1.0, spec, *rule);
  if (!b_inf) return gl_right(f, b, -1.0, spec, *rule);
  return gl_right(f, 0.0, 1.0, spec, *rule) + gl_right(f, 0.0, -1.0, spec, *rule);
}

// Breakpoints closer than this to a bound are dropped; a sliver of a few ulps
// has no resolvable nodes.
double cut_gap(double x) { return std::isfinite(x) ? 1e-12 * std::max(1.0, std::abs(x)) : 0.0; }

}  // namespace

void QuadratureSpec::check() const {
  if (panels < 1 || nodes_per_panel < 1) {
    throw InvalidInput("QuadratureSpec: panels and nodes_per_panel must be positive");
  }
  if (!(rel_target > 0.0) || rel_target > 1e-2) {
    throw InvalidInput("QuadratureSpec: rel_target must lie in (0, 1e-2]");
  }
}

double integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec,
                 std::span<const double> breakpoints) {
  spec.check();
  if (std::isnan(a) || std::isnan(b)) throw InvalidInput("integrate: NaN bound");
  if (a > b) return -integrate(f, b, a, spec, breakpoints);
  std::vector<double> cuts{a};
  std::vector<double> inner(breakpoints.begin(), breakpoints.end());
  std::sort(inner.begin(), inner.end());
  for (double x : inner) {
    if (x > cuts.back() + cut_gap(cuts.back()) && x < b - cut_gap(b)) cuts.push_back(x);
  }
  cuts.push_back(b);

  GaussRule rule;
  if (spec.scheme == Scheme::gauss_legendre_composite) rule = gauss_legendre(spec.nodes_per_panel);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate_piece(f, cuts[i], cuts[i + 1], spec, &rule);
  }
  return total;
}

double integrate_adaptive(const Integrand& f, double a, double b, const QuadratureSpec& spec,
                          std::span<const double> breakpoints) {
  spec.check();
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidInput("integrate_adaptive: bounds must be finite");
  }
  if (spec.scheme != Scheme::double_exponential) return integrate(f, a, b, spec, breakpoints);
  if (a > b) return -integrate_adaptive(f, b, a, spec, breakpoints);
  if (a == b) return 0.0;
  std::vector<double> cuts{a};
  std::vector<double> inner(breakpoints.begin(), breakpoints.end());
  std::sort(inner.begin(), inner.end());
  for (double x : inner) {
    if (x > cuts.back() + cut_gap(cuts.back()) && x < b - cut_gap(b)) cuts.push_back(x);
  }
  cuts.push_back(b);

  std::vector<DeAttempt> first;
  bool all = true;
  double total = 0.0;
  double magnitude = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    first.push_back(de_attempt(f, DeTransform::finite(cuts[i], cuts[i + 1]), spec.rel_target, 0.0));
    all = all && first.back().converged;
    total += first.back().estimate;
    magnitude += first.back().magnitude;
  }
  if (all) return total;
  const double abs_per_length = spec.rel_target * magnitude / (b - a);
  total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += first[i].converged
                 ? first[i].estimate
                 : de_bisect(f, cuts[i], cuts[i + 1], spec.rel_target, abs_per_length, 0);
  }
  return total;
}

double integrate_capped(const Integrand& f, double a, double b, double cap,
                        const QuadratureSpec& spec, std::span<const double> breakpoints) {
  spec.check();
  if (!(cap > 0.0)) throw InvalidInput("integrate_capped: cap must be positive");
  if (std::isnan(a) || std::isnan(b)) throw InvalidInput("integrate_capped: NaN bound");
  if (a > b) return -integrate_capped(f, b, a, cap, spec, breakpoints);
  const bool a_open = a < -cap;
  const bool b_open = b > cap;
  a = std::max(a, -cap);
  b = std::min(b, cap);
  if (!(a < b)) return 0.0;
  std::vector<double> cuts{a};
  std::vector<double> inner(breakpoints.begin(), breakpoints.end());
  std::sort(inner.begin(), inner.end());
  for (double x : inner) {
    if (x > cuts.back() + cut_gap(cuts.back()) && x < b - cut_gap(b)) cuts.push_back(x);
  }
  cuts.push_back(b);
  double total = 0.0;
  if (spec.scheme == Scheme::gauss_legendre_composite) {
    total = integrate(f, a, b, spec, std::span<const double>(cuts).subspan(1, cuts.size() - 2));
  } else {
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      total += de_integrate(f, DeTransform::finite(cuts[i], cuts[i + 1]), spec.rel_target);
    }
  }
  // An infinite end was replaced by the cap; the integrand must have died out
  // there (in log-radius variables the neglected tail is about f(cap)/rate).
  for (double end : {a_open ? a : 0.0, b_open ? b : 0.0}) {
    if (end == 0.0) continue;
    const double v = f(end);
    if (!std::isfinite(v) || std::abs(v) > kDivergenceThreshold * std::abs(total)) {
      throw DivergenceError("integrand has not decayed at |u| = " + fmt(cap) + " (value " +
                            fmt(v) + " vs integral " + fmt(total) + ")");
    }
  }
  return total;
}

double integrate_line(const Integrand& f, double center, const QuadratureSpec& spec) {
  spec.check();
  if (spec.scheme == Scheme::double_exponential) {
    return de_integrate(f, DeTransform::line(center), spec.rel_target);
  }
  const double c = center;
  return integrate(f, -kInf, c, spec) + integrate(f, c, kInf, spec);
}

double radial_integral(const Integrand& F, const hgroup::GroupParams& gp,
                       const QuadratureSpec& spec, std::span<const double> breakpoints) {
  spec.check();
  const int Q = gp.Q;
  if (spec.scheme == Scheme::gauss_legendre_composite) {
    Integrand g = [&](double r) {
      if (r <= 0.0) return 0.0;
      const double v = F(r);
      return v == 0.0 ? 0.0 : v * std::pow(r, Q - 1);
    };
    return gp.omega_Q * integrate(g, 0.0, kInf, spec, breakpoints);
  }
  // u = log r keeps power-law ends exponentially decaying. |u| is capped so
  // that r^Q stays representable; a tail still alive at the cap is divergent.
  const double cap = 700.0 / Q;
  Integrand g = [&](double u) {
    const double v = F(std::exp(u));
    return v == 0.0 ? 0.0 : v * std::exp(Q * u);
  };
  std::vector<double> cuts;
  for (double r : breakpoints) {
    if (r > 0.0 && std::isfinite(r)) cuts.push_back(std::log(r));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  if (cuts.empty()) {
    total = de_integrate(g, DeTransform::line(0.0, cap), spec.rel_target);
  } else {
    total += de_integrate(g, DeTransform::left(cuts.front(), cap), spec.rel_target);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      total += de_integrate(g, DeTransform::finite(cuts[i], cuts[i + 1]), spec.rel_target);
    }
    total += de_integrate(g, DeTransform::right(cuts.back(), cap), spec.rel_target);
  }
  return gp.omega_Q * total;
}

double radial_integral(const RadialProfile& f, const hgroup::GroupParams& gp,
                       const QuadratureSpec& spec) {
  if (f.is_zero()) return 0.0;
  const int Q = gp.Q;
  Integrand g = [&](double u) {
    const double lv = f.log_value_at_log(u);
    return lv == -kInf ? 0.0 : std::exp(lv + Q * u);
  };
  const double lo = f.support_lo();
  const double hi = f.support_hi();
  std::vector<double> cuts;
  for (double r : f.breakpoints()) cuts.push_back(std::log(r));
  const double a = lo > 0.0 ? std::log(lo) : -kInf;
  const double b = std::isfinite(hi) ? std::log(hi) : kInf;
  return gp.omega_Q * integrate(g, a, b, spec, cuts);
}

RegionIntegrals hlp_region_integrals(const ExponentSet& e, const hgroup::GroupParams& gp,
                                     const QuadratureSpec& spec) {
  spec.check();
  const int m = e.m();
  if (m < 1) throw InvalidInput("hlp oracle: empty exponent list");
  const double Q = gp.Q;
  const double omega_m = std::pow(gp.omega_Q, m);

  // log G_j(u), G_j(u) = int_0^{e^u} r^{sigma_j+Q-1} dr = int_{-inf}^u e^{c v} dv.
  // Shifting v = u + w gives e^{c u} int_{-inf}^0 e^{c w} dw, so each inner
  // integral is one quadrature and large |u| cannot overflow.
  std::vector<double> log_scaled(m);
  for (int j = 0; j < m; ++j) {
    const double c = e.sigma_list[j] + Q;
    log_scaled[j] = std::log(integrate([c](double w) { return std::exp(c * w); }, -kInf, 0.0, spec));
  }
  auto log_inner = [&](int j, double u) { return (e.sigma_list[j] + Q) * u + log_scaled[j]; };

  RegionIntegrals out;
  out.regions.assign(m + 1, 0.0);

  double log_e0 = 0.0;
  for (int j = 0; j < m; ++j) log_e0 += log_inner(j, 0.0);
  out.regions[0] = omega_m * std::exp(log_e0);

  for (int k = 0; k < m; ++k) {
    const double ck = e.sigma_list[k] + Q - m * Q;
    Integrand outer = [&](double u) {
      double lv = ck * u;
      for (int j = 0; j < m; ++j) {
        if (j != k) lv += log_inner(j, u);
      }
      return std::exp(lv);
    };
    out.regions[k + 1] = omega_m * integrate(outer, 0.0, kInf, spec);
  }
  for (double r : out.regions) out.total += r;
  return out;
}

double hlp_constant_oracle(const ExponentSet& e, const hgroup::GroupParams& gp,
                           const QuadratureSpec& spec) {
  return hlp_region_integrals(e, gp, spec).total;
}

double beta_type_integral(double a, double s, const QuadratureSpec& spec) {
  // t = e^u: e^{a u} (1 + e^u)^{-s}, with log(1 + e^u) evaluated stably.
  Integrand g = [a, s](double u) {
    const double softplus = std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
    return std::exp(a * u - s * softplus);
  };
  return integrate(g, -kInf, kInf, spec);
}

double hilbert_constant_oracle(const ExponentSet& e, const hgroup::GroupParams& gp,
                               const QuadratureSpec& spec) {
  spec.check();
  const int m = e.m();
  if (m < 1) throw InvalidInput("hilbert oracle: empty exponent list");
  const double Q = gp.Q;
  double outer_power = m;
  double value = std::pow(gp.Omega_Q, m);
  for (int k = m - 1; k >= 0; --k) {
    const double shape = 1.0 + e.sigma_list[k] / Q;
    value *= beta_type_integral(shape, outer_power, spec);
    outer_power -= shape;
  }
  return value;
}

void to_json(nlohmann::json& j, const QuadratureSpec& spec) {
  j = nlohmann::json{
      {"scheme", spec.scheme == Scheme::double_exponential ? "double_exponential"
                                                           : "gauss_legendre_composite"},
      {"panels", spec.panels},
      {"nodes_per_panel", spec.nodes_per_panel},
      {"infinity_transform",
       spec.infinity_transform == InfinityTransform::rational_map ? "rational_map" : "exp_map"},
      {"rel_target", spec.rel_target}};
}

}  // namespace hsharp::quad
