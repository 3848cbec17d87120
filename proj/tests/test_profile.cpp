#include <cmath>

#include "doctest.h"
#include "hsharp/error.hpp"
#include "hsharp/profile.hpp"

using namespace hsharp;

TEST_CASE("power and truncated power values and moments") {
  const auto f = RadialProfile::power(-1.0, 2.0);
  CHECK(f(4.0) == doctest::Approx(0.5));
  // int_0^2 (2/r)^2 r^3 dr = 4 * 2 = 8
  CHECK(f.moment(0.0, 2.0, 2.0, 3.0) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK_THROWS_AS(f.moment(0.0, 1.0, 2.0, 0.0), DivergenceError);
  CHECK_THROWS_AS(f.moment(1.0, INFINITY, 1.0, 0.0), DivergenceError);

  const auto t = RadialProfile::truncated_power(0.0, 1.0, 3.0);
  CHECK(t(0.5) == 0.0);
  CHECK(t(2.0) == 1.0);
  CHECK(t(3.5) == 0.0);
  CHECK(t.moment(0.0, INFINITY, 1.0, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(t.breakpoints() == std::vector<double>{1.0, 3.0});
}

TEST_CASE("dilation and scaling") {
  const auto f = RadialProfile::truncated_power(-1.5, 0.1, 10.0, 3.0);
  const auto g = f.dilated(2.0);
  for (double r : {0.06, 0.5, 2.0, 4.9}) CHECK(g(r) == doctest::Approx(f(2.0 * r)).epsilon(1e-14));
  CHECK(g(5.1) == 0.0);
  const auto h = f.scaled(4.0);
  CHECK(h(1.0) == doctest::Approx(12.0));
}

TEST_CASE("tabulated profile interpolates in log-log space") {
  const auto f = RadialProfile::tabulated({1.0, 10.0, 100.0}, {1.0, 0.1, 0.1});
  CHECK(f(std::sqrt(10.0)) == doctest::Approx(std::pow(10.0, -0.5)).epsilon(1e-14));
  CHECK(f(50.0) == doctest::Approx(0.1).epsilon(1e-14));
  // below the first knot the boundary slope continues down to 0
  CHECK(f(0.1) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(f(200.0) == 0.0);
  const auto e = RadialProfile::tabulated({1.0, 10.0}, {1.0, 0.1}, {0.5, 100.0});
  CHECK(e(0.4) == 0.0);
  CHECK(e(0.5) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e(100.0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(RadialProfile::tabulated({1.0, 1.0}, {1.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(RadialProfile::tabulated({1.0, 2.0}, {1.0, -1.0}), InvalidInput);
}

TEST_CASE("cumulative mass") {
  const auto f = RadialProfile::truncated_power(-1.0, 1.0, 2.0);
  const CumulativeMass M(f, 4);
  // int_1^R r^2 dr
  CHECK(M.mass(1.5) == doctest::Approx((1.5 * 1.5 * 1.5 - 1.0) / 3.0).epsilon(1e-14));
  CHECK(M.mass(5.0) == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
  CHECK(M.mass(0.5) == 0.0);
}

TEST_CASE("json round trip and zero profile") {
  const auto f = RadialProfile::truncated_power(-0.5, 0.2, 7.0, 1.5);
  nlohmann::json j = f;
  const auto g = profile_from_json(j);
  CHECK(g(1.0) == f(1.0));
  CHECK(RadialProfile::zero().is_zero());
  CHECK_THROWS_AS(profile_from_json(nlohmann::json{{"kind", "spline"}}), InvalidInput);
}
