#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hsharp/error.hpp"
#include "hsharp/specfun.hpp"

using namespace hsharp;

TEST_CASE("gamma against reference values") {
  CHECK(specfun::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-15));
  CHECK(specfun::gamma(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-15));
  CHECK(specfun::gamma(0.3) == doctest::Approx(2.99156898768759062831).epsilon(1e-14));
  CHECK(specfun::gamma(-1.5) == doctest::Approx(2.36327180120735470306).epsilon(1e-14));
  CHECK(specfun::gamma(10.5) == doctest::Approx(1133278.38894878556733).epsilon(1e-14));
  CHECK(specfun::log_gamma(100.0) == doctest::Approx(359.134205369575398776).epsilon(1e-15));
  CHECK(specfun::beta(0.7, 2.2) == doctest::Approx(0.782661571347350944236).epsilon(1e-14));
}

TEST_CASE("gamma error estimate is small") {
  const auto g = specfun::gamma_with_error(3.7);
  CHECK(g.abs_err_estimate >= 0.0);
  CHECK(g.abs_err_estimate < 1e-12 * g.value);
}

TEST_CASE("gamma domain") {
  CHECK_THROWS_AS(specfun::gamma(0.0), DomainError);
  CHECK_THROWS_AS(specfun::gamma(-3.0), DomainError);
  CHECK_THROWS_AS(specfun::gamma(200.0), OverflowError);
  CHECK_THROWS_AS(specfun::beta(-1.0, 2.0), DomainError);
}

TEST_CASE("gamma identities") {
  for (double x = 0.1; x <= 80.0; x += 0.37) {
    CHECK(specfun::gamma(x + 1.0) == doctest::Approx(x * specfun::gamma(x)).epsilon(1e-12));
  }
  for (double x = 0.01; x < 1.0; x += 0.049) {
    CHECK(specfun::gamma(x) * specfun::gamma(1.0 - x) ==
          doctest::Approx(std::numbers::pi / std::sin(std::numbers::pi * x)).epsilon(1e-10));
  }
  CHECK(specfun::gamma(1.5) == doctest::Approx(0.5 * std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(specfun::log_gamma(1.0) == doctest::Approx(0.0));
  CHECK(specfun::log_gamma(0.5) == doctest::Approx(0.5723649429247001).epsilon(1e-14));
  CHECK(specfun::log_gamma(10.0) == doctest::Approx(std::log(362880.0)).epsilon(1e-14));
  CHECK_THROWS_AS(specfun::log_gamma(0.0), DomainError);
}

TEST_CASE("beta values") {
  CHECK(specfun::beta(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(specfun::beta(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(specfun::beta(0.5, 0.5) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
}
