// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hsharp/cli.hpp"
#include "hsharp/constants.hpp"
#include "hsharp/error.hpp"
#include "hsharp/morrey.hpp"
#include "hsharp/operators.hpp"

using namespace hsharp;
using hgroup::HPoint;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Random admissible parameter sets, m <= 3 and n <= 2.
ParamSet random_admissible(mc::CounterRng& rng) {
  for (;;) {
    const int m = 1 + static_cast<int>(rng.uniform() * 3.0);
    const int n = 1 + static_cast<int>(rng.uniform() * 2.0);
    std::vector<double> qj, gj;
    for (int j = 0; j < m; ++j) {
      qj.push_back(m * rng.uniform(1.1, 4.0));
      gj.push_back(rng.uniform(-0.5, 0.5));
    }
    double inv = 0.0;
    for (double v : qj) inv += 1.0 / v;
    const double q = 1.0 / inv;
    const double lambda = -rng.uniform(0.05, 0.95) / q;
    const auto p = ParamSet::coupled(n, qj, lambda, gj, rng.uniform(-1.0, 1.0));
    if (validate(p, false).ok()) return p;
  }
}

void anchors(int id, OperatorKind kind) {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst_anchor = 0.0, worst_oracle = 0.0;
  const auto gp = hgroup::ball_volume_constant(1);
  for (double q : {1.5, 2.0, 3.0, 5.0}) {
    const auto a = classical_anchor_report(kind, 1, q, 1e-10);
    const auto o = reconcile(kind, ParamSet::coupled(1, {q}, -1.0 / q), 1e-8);
    ok = ok && a.passed && o.passed;
    worst_anchor = std::max(worst_anchor, a.rel_err);
    worst_oracle = std::max(worst_oracle, o.rel_err);
    (void)gp;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 1.0;
  verdict(id, kind == OperatorKind::hlp ? "HLP classical anchor" : "Hilbert classical anchor", ok,
          fmt("max rel err vs Omega_Q anchor %.2e, vs oracle %.2e, %.3f s", worst_anchor,
              worst_oracle, secs));
}

void reconciliation(int id, OperatorKind kind, double budget) {
  const auto t0 = Clock::now();
  mc::CounterRng rng(20240611, kind == OperatorKind::hlp ? 3 : 4);
  bool ok = true;
  double worst = 0.0, worst_beta = 0.0;
  int count = 0;
  for (int i = 0; i < 50; ++i) {
    const auto p = random_admissible(rng);
    const auto r = reconcile(kind, p, 1e-6);
    ok = ok && r.passed;
    worst = std::max(worst, r.rel_err);
    if (kind == OperatorKind::hilbert) {
      const auto b = reconcile_beta_recursion(p, 1e-12);
      ok = ok && b.passed;
      worst_beta = std::max(worst_beta, b.rel_err);
    }
    ++count;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < budget;
  if (kind == OperatorKind::hlp) {
    verdict(id, "A_m reconciliation", ok,
            fmt("%g sets, max rel err %.2e, %.2f s", count, worst, secs));
  } else {
    verdict(id, "B_m reconciliation", ok,
            fmt("%g sets, max rel err %.2e, beta recursion vs Gamma product %.2e", count, worst,
                worst_beta) +
                fmt(", %.2f s", secs));
  }
}

void dilation(int id) {
  mc::CounterRng rng(20240611, 5);
  bool ok = true;
  double worst = 0.0;
  int spaces = 0;
  const auto t0 = Clock::now();
  while (spaces < 10) {
    const auto p = random_admissible(rng);
    if (!(p.lambda > -1.0 / p.q)) continue;
    const auto gp = hgroup::ball_volume_constant(p.n);
    const MorreySpaceSpec space = target_space(p);
    const auto f = RadialProfile::power(derive_exponents(p).sigma);
    for (double t : {0.5, 2.0, 10.0}) {
      const auto r = verify_dilation(f, t, space, BallGrid::default_grid(p.n), gp, {}, 1e-10);
      ok = ok && r.passed;
      worst = std::max(worst, r.rel_err);
    }
    ++spaces;
  }
  verdict(id, "Morrey dilation covariance", ok,
          fmt("10 spaces x t in {0.5, 2, 10}, worst cell rel err %.2e, %.1f s", worst,
              seconds_since(t0)));
}

void sharpness_criterion(int id) {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  const std::vector<ParamSet> sets{ParamSet::coupled(1, {2.0}, -0.25),
                                   ParamSet::coupled(1, {4.0, 4.0}, -0.25)};
  for (const auto& p : sets) {
    for (auto kind : {OperatorKind::hlp, OperatorKind::hilbert}) {
      const auto rows = cli::emit_convergence_table(kind, p, {{1e-2, 1e2}, {1e-3, 1e3}},
                                                    BallGrid::default_grid(1), {}, {});
      const double a = rows[0].ratio_over_constant;
      const double b = rows[1].ratio_over_constant;
      ok = ok && a >= 0.90 && b > a && a <= 1.0 + 1e-3 && b <= 1.0 + 1e-3;
      detail += to_string(kind) + " m=" + std::to_string(p.m) + fmt(" %.6f -> %.6f; ", a, b);
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 600.0;
  verdict(id, "Sharpness of truncated extremizers", ok, detail + fmt("%.1f s", secs));
}

void group_suite(int id) {
  bool ok = true;
  int reports = 0;
  double worst_z = 0.0;
  for (int n : {1, 2}) {
    // As on the command line, the sample count serves both the random triples
    // and the Monte Carlo volume draws.
    mc::MCSpec mc;
    mc.samples = 10000;
    for (const auto& r : cli::group_check(n, mc.samples, mc)) {
      ok = ok && r.passed;
      ++reports;
      if (r.extra.contains("stderr")) {
        worst_z = std::max(worst_z, r.abs_err / r.extra["stderr"].get<double>());
      }
    }
  }
  verdict(id, "Heisenberg group suite", ok,
          fmt("%g property and volume checks on 1e4 triples and 1e4 volume samples, n in {1, 2}; worst volume z %.2f",
              reports, worst_z));
}

void radialization(int id) {
  const auto t0 = Clock::now();
  const auto gp = hgroup::ball_volume_constant(1);
  mc::MCSpec mc;
  const MorreySpaceSpec space{2.0, -0.25, 0.0, 0.0};
  auto grid = BallGrid::default_grid(1);
  grid.radii.clear();
  for (int i = 0; i <= 8; ++i) grid.radii.push_back(std::pow(10.0, -2.0 + i / 2.0));

  struct Case {
    const char* name;
    mc::PointFunction f;
    std::vector<double> breaks;
  };
  const HPoint shift(1, {0.7, -0.2, 0.4});
  const std::vector<Case> cases{
      {"tilted power",
       [](const HPoint& x) {
         const double r = hgroup::hnorm(x);
         return (1.0 + 0.8 * x[0] / r) * std::pow(r, -1.0) * (r < 20.0 ? 1.0 : 0.0);
       },
       {20.0}},
      {"half-space power",
       [](const HPoint& x) {
         const double r = hgroup::hnorm(x);
         return x[0] > 0.0 && r > 0.05 && r < 10.0 ? std::pow(r, -1.2) : 0.0;
       },
       {0.05, 10.0}},
      {"oscillating exponential",
       [](const HPoint& x) {
         const double r = hgroup::hnorm(x);
         return std::exp(-r) * (1.0 + 0.5 * std::sin(3.0 * x[2] / (r * r)));
       },
       {}},
      {"anisotropic power",
       [](const HPoint& x) {
         const double r = hgroup::hnorm(x);
         return std::pow(r, -0.5) * (x[1] * x[1] / (r * r) + 0.1) * (r < 5.0 ? 1.0 : 0.0);
       },
       {5.0}},
      {"shifted Gaussian",
       [shift](const HPoint& x) {
         const double d = hgroup::hdist(x, shift);
         return std::exp(-d * d);
       },
       {}},
  };

  bool ok = true;
  std::string detail;
  RadializeOptions opt;
  opt.r_min = 1e-3;
  opt.r_max = 110.0;
  for (const auto& c : cases) {
    const auto con = radialization_contraction(c.f, space, grid, gp, mc, opt.r_min, opt.r_max,
                                               opt.knots_per_decade, c.breaks);
    const bool contracts = con.holds(3.0);
    double worst_z = 0.0;
    for (auto kind : {OperatorKind::hlp, OperatorKind::hilbert}) {
      const std::vector<mc::PointFunction> fs{c.f};
      const auto nc = radialization_neutrality(kind, fs, 1.0, gp, mc, opt, c.breaks);
      worst_z = std::max(worst_z, nc.z_score());
    }
    ok = ok && contracts && worst_z <= 3.0;
    detail += std::string(c.name) + fmt(" (%.4g <= %.4g, z %.2f); ", con.radialized,
                                        con.direct.value, worst_z);
  }
  verdict(id, "Radialization contraction and neutrality", ok, detail + fmt("%.1f s", seconds_since(t0)));
}

void divergence(int id) {
  // Five sets with sigma >= 0 and five with Q + sigma_j <= 0.
  std::vector<std::pair<ParamSet, std::string>> sets;
  for (int i = 0; i < 5; ++i) {
    sets.push_back({ParamSet::coupled(1 + i % 2, i % 2 ? std::vector<double>{4.0, 4.0}
                                                       : std::vector<double>{2.0},
                                      -0.25, i % 2 ? std::vector<double>{-3.0 - i, -1.0}
                                                   : std::vector<double>{-3.0 - i}),
                    "sigma_negative"});
  }
  for (int i = 0; i < 5; ++i) {
    sets.push_back({ParamSet::coupled(1 + i % 2, i % 2 ? std::vector<double>{4.0, 4.0}
                                                       : std::vector<double>{2.0},
                                      -0.25, i % 2 ? std::vector<double>{12.0 + i, -10.0}
                                                   : std::vector<double>{8.0 + i}),
                    "local_integrability"});
  }
  bool ok = true;
  int caught = 0;
  for (const auto& [p, code] : sets) {
    const auto v = validate(p, false);
    const bool named = v.has(code);
    const auto e = derive_exponents(p);
    const auto gp = hgroup::ball_volume_constant(p.n);
    int thrown = 0;
    try {
      quad::hlp_constant_oracle(e, gp);
    } catch (const DivergenceError&) {
      ++thrown;
    } catch (const Error&) {
    }
    try {
      quad::hilbert_constant_oracle(e, gp);
    } catch (const DivergenceError&) {
      ++thrown;
    } catch (const Error&) {
    }
    if (!named || thrown != 2) {
      std::printf("    divergence case failed: %s [%s]\n", v.summary().c_str(), code.c_str());
    }
    ok = ok && named && thrown == 2;
    caught += thrown;
  }
  verdict(id, "Divergence detection", ok,
          fmt("%g inadmissible sets, %g oracle calls raised DivergenceError", sets.size(), caught));
}

}  // namespace

int main() {
  anchors(1, OperatorKind::hlp);
  anchors(2, OperatorKind::hilbert);
  reconciliation(3, OperatorKind::hlp, 60.0);
  reconciliation(4, OperatorKind::hilbert, 120.0);
  dilation(5);
  sharpness_criterion(6);
  group_suite(7);
  radialization(8);
  divergence(9);
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
