#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hsharp/error.hpp"
#include "hsharp/quad.hpp"
#include "hsharp/specfun.hpp"

using namespace hsharp;
using quad::QuadratureSpec;

namespace {
QuadratureSpec gl() {
  QuadratureSpec s;
  s.scheme = quad::Scheme::gauss_legendre_composite;
  return s;
}
}  // namespace

TEST_CASE("one-dimensional integrals") {
  const double pi = std::numbers::pi;
  for (const auto& spec : {QuadratureSpec{}, gl()}) {
    CHECK(quad::integrate([](double x) { return std::exp(-x); }, 0.0, INFINITY, spec) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, spec) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(quad::integrate([](double x) { return 1.0 / (1.0 + x * x); }, -INFINITY, INFINITY, spec) ==
          doctest::Approx(pi).epsilon(1e-11));
  }
  CHECK(quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-10));
  const double breaks[] = {1.0};
  CHECK(quad::integrate([](double x) { return x < 1.0 ? 1.0 : 0.0; }, 0.0, 3.0, {}, breaks) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("divergent integrals are detected") {
  CHECK_THROWS_AS(quad::integrate([](double x) { return 1.0 / x; }, 1.0, INFINITY),
                  DivergenceError);
  CHECK_THROWS_AS(quad::integrate([](double) { return NAN; }, 0.0, 1.0), DivergenceError);
}

TEST_CASE("radial integral of a Gaussian-type profile") {
  const auto gp = hgroup::ball_volume_constant(1);
  // omega int_0^inf e^{-r^4} r^3 dr = omega / 4 = Omega
  const double v = quad::radial_integral([](double r) { return std::exp(-std::pow(r, 4)); }, gp);
  CHECK(v == doctest::Approx(gp.Omega_Q).epsilon(1e-12));
  const auto f = RadialProfile::truncated_power(0.0, 0.0, 1.0);
  CHECK(quad::radial_integral(f, gp) == doctest::Approx(gp.Omega_Q).epsilon(1e-12));
}

TEST_CASE("constant oracles") {
  const auto gp = hgroup::ball_volume_constant(1);
  const auto e = ExponentSet::from_sigmas({-0.5, -0.5});
  CHECK(quad::hlp_constant_oracle(e, gp) == doctest::Approx(254.456401068414530).epsilon(1e-12));
  CHECK(quad::hilbert_constant_oracle(e, gp) == doctest::Approx(104.832634511847590).epsilon(1e-12));
  CHECK(quad::hlp_constant_oracle(e, gp, gl()) == doctest::Approx(254.456401068414530).epsilon(1e-10));
  const auto regions = quad::hlp_region_integrals(e, gp);
  CHECK(regions.regions.size() == 3);
  double sum = 0.0;
  for (double r : regions.regions) sum += r;
  CHECK(sum == doctest::Approx(regions.total).epsilon(1e-14));
  CHECK(quad::beta_type_integral(0.5, 1.0) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("oracles reject divergent exponents") {
  const auto gp = hgroup::ball_volume_constant(1);
  CHECK_THROWS_AS(quad::hlp_constant_oracle(ExponentSet::from_sigmas({0.5}), gp), DivergenceError);
  CHECK_THROWS_AS(quad::hilbert_constant_oracle(ExponentSet::from_sigmas({0.5}), gp),
                  DivergenceError);
  CHECK_THROWS_AS(quad::hlp_constant_oracle(ExponentSet::from_sigmas({-5.0}), gp), DivergenceError);
  CHECK_THROWS_AS(quad::hilbert_constant_oracle(ExponentSet::from_sigmas({-5.0}), gp),
                  DivergenceError);
}

TEST_CASE("spec validation") {
  QuadratureSpec s;
  s.rel_target = 0.5;
  CHECK_THROWS_AS(s.check(), InvalidInput);
  s = {};
  s.panels = 0;
  CHECK_THROWS_AS(s.check(), InvalidInput);
}

TEST_CASE("beta integral representation") {
  for (double a : {0.25, 1.0, 3.5, 8.0}) {
    for (double b : {0.25, 2.0, 8.0}) {
      CHECK(quad::beta_type_integral(a, a + b) == doctest::Approx(specfun::beta(a, b)).epsilon(1e-8));
    }
  }
}

TEST_CASE("m = 1 oracles against their one-dimensional forms") {
  for (int n : {1, 2}) {
    const auto gp = hgroup::ball_volume_constant(n);
    for (double s = -0.2; s > -gp.Q; s -= 0.45) {
      const auto e = ExponentSet::from_sigmas({s});
      CHECK(quad::hlp_constant_oracle(e, gp) ==
            doctest::Approx(gp.omega_Q * (1.0 / (gp.Q + s) + 1.0 / -s)).epsilon(1e-8));
      CHECK(quad::hilbert_constant_oracle(e, gp) ==
            doctest::Approx(gp.Omega_Q * specfun::beta(1.0 + s / gp.Q, -s / gp.Q)).epsilon(1e-8));
    }
  }
}

TEST_CASE("region integrals are nonnegative and permutation invariant") {
  const auto gp = hgroup::ball_volume_constant(1);
  const auto a = quad::hlp_region_integrals(ExponentSet::from_sigmas({-0.3, -0.3, -1.1}), gp);
  const auto b = quad::hlp_region_integrals(ExponentSet::from_sigmas({-0.3, -1.1, -0.3}), gp);
  for (double r : a.regions) CHECK(r >= 0.0);
  CHECK(a.total == doctest::Approx(b.total).epsilon(1e-12));
  CHECK(a.regions[1] == doctest::Approx(a.regions[2]).epsilon(1e-12));
}

TEST_CASE("adaptive integration resolves an interior kink") {
  const double c = 1.0 / std::numbers::sqrt2;
  const auto kink = [c](double x) { return std::abs(x - c); };
  const double exact = 0.5 * (c * c + (1.0 - c) * (1.0 - c));
  CHECK_THROWS_AS(quad::integrate(kink, 0.0, 1.0), ConvergenceError);
  CHECK(quad::integrate_adaptive(kink, 0.0, 1.0) == doctest::Approx(exact).epsilon(1e-11));
  const auto smooth = [](double x) { return std::exp(-x * x); };
  CHECK(quad::integrate_adaptive(smooth, 0.0, 2.0) == quad::integrate(smooth, 0.0, 2.0));
  CHECK_THROWS_AS(quad::integrate_adaptive(smooth, 0.0, INFINITY), InvalidInput);
}
