#include <cmath>

#include "doctest.h"
#include "hsharp/error.hpp"
#include "hsharp/morrey.hpp"

using namespace hsharp;
using hgroup::HPoint;

namespace {
BallGrid small_grid(int n) {
  auto g = BallGrid::default_grid(n);
  g.radii = {0.1, 1.0, 10.0};
  return g;
}
}  // namespace

TEST_CASE("origin cells of a power profile") {
  const auto gp = hgroup::ball_volume_constant(1);
  const MorreySpaceSpec sp{2.0, -0.25, 0.0, 0.0};
  const auto e = morrey_norm(RadialProfile::power(-1.0), sp, BallGrid::default_grid(1), gp, {});
  for (const auto& c : e.cells) {
    if (c.direction < 0) CHECK(c.value == doctest::Approx(2.10781473051081175).epsilon(1e-14));
  }
  CHECK(e.value >= e.origin_value());
  CHECK(e.cells.size() == 17 * 7);
}

TEST_CASE("trivial norms") {
  const auto gp = hgroup::ball_volume_constant(1);
  CHECK(morrey_norm(RadialProfile::zero(), {2.0, -0.25, 0.0, 0.0}, small_grid(1), gp, {}).value == 0.0);
  // lambda = -1/q: the plain L^q norm of the indicator of B(0, 1)
  const auto e = morrey_norm(RadialProfile::truncated_power(0.0, 0.0, 1.0), {2.0, -0.5, 0.0, 0.0},
                             small_grid(1), gp, {});
  CHECK(e.origin_value() == doctest::Approx(2.22144146907918312).epsilon(1e-14));
}

TEST_CASE("homogeneity and grid monotonicity") {
  const auto gp = hgroup::ball_volume_constant(1);
  const MorreySpaceSpec sp{3.0, -0.2, 0.5, -0.3};
  const auto f = RadialProfile::truncated_power(-0.8, 0.05, 5.0);
  const auto a = morrey_norm(f, sp, small_grid(1), gp, {});
  const auto b = morrey_norm(f.scaled(3.0), sp, small_grid(1), gp, {});
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(b.cells[i].value == doctest::Approx(3.0 * a.cells[i].value).epsilon(1e-13));
  }
  auto bigger = small_grid(1);
  bigger.radii = {0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
  bigger.center_radii.push_back(2.0);
  CHECK(morrey_norm(f, sp, bigger, gp, {}).value >= a.value);
}

TEST_CASE("dilation covariance") {
  const auto gp = hgroup::ball_volume_constant(2);
  const MorreySpaceSpec sp{2.5, -0.3, 0.4, 0.2};
  for (double t : {0.5, 2.0, 10.0}) {
    const auto r = verify_dilation(RadialProfile::power(-1.2), t, sp, small_grid(2), gp, {});
    CHECK(r.passed);
    CHECK(r.rel_err <= 1e-10);
  }
  const auto one = verify_dilation(RadialProfile::power(-1.0), 2.0, {2.0, -0.25, 0.0, 0.0},
                                   small_grid(1), hgroup::ball_volume_constant(1), {});
  CHECK(one.extra["first_origin_cell_ratio"].get<double>() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("divergent cells and invalid inputs") {
  const auto gp = hgroup::ball_volume_constant(1);
  CHECK_THROWS_AS(morrey_norm(RadialProfile::power(-2.0), {2.0, -0.25, 0.0, 0.0}, small_grid(1), gp, {}),
                  DivergenceError);
  CHECK_THROWS_AS(morrey_norm(RadialProfile::power(-1.0), {2.0, 0.0, 0.0, 0.0}, small_grid(1), gp, {}),
                  InvalidInput);
  auto g = small_grid(1);
  g.radii = {1.0, 0.5};
  CHECK_THROWS_AS(g.check(1), InvalidInput);
  g = small_grid(1);
  g.center_radii = {1.0};
  CHECK_THROWS_AS(g.check(1), InvalidInput);
}

TEST_CASE("general-function estimator matches the radial one") {
  const auto gp = hgroup::ball_volume_constant(1);
  const MorreySpaceSpec sp{2.0, -0.25, 0.0, 0.0};
  mc::MCSpec mc;
  mc.samples = 1000;
  auto g = small_grid(1);
  g.center_radii = {0.0, 1.0};
  const auto f = RadialProfile::truncated_power(-1.0, 0.01, 5.0);
  const auto a = morrey_norm(f, sp, g, gp, mc);
  const double breaks[] = {0.01, 5.0};
  const auto b =
      morrey_norm_mc([&](const HPoint& x) { return f(hgroup::hnorm(x)); }, sp, g, gp, mc, breaks);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(b.cells[i].value == doctest::Approx(a.cells[i].value).epsilon(1e-6));
  }
}

TEST_CASE("sharpness ratio for m = 1") {
  const auto p = ParamSet::coupled(1, {2.0}, -0.25);
  const auto r = sharpness_ratio(OperatorKind::hlp, p, {1e-1, 1e1}, BallGrid::default_grid(1), {}, {});
  CHECK(r.passed);
  const double ratio = r.extra["ratio_over_constant"].get<double>();
  CHECK(ratio > 0.9);
  CHECK(ratio <= 1.0 + 1e-3);
  CHECK_THROWS_AS(sharpness_ratio(OperatorKind::hlp, ParamSet::coupled(1, {2.0}, -0.5), {1e-1, 1e1},
                                  BallGrid::default_grid(1), {}, {}),
                  InvalidInput);
}
