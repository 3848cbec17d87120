#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hsharp/constants.hpp"
#include "hsharp/error.hpp"

using namespace hsharp;

TEST_CASE("closed forms at frozen points") {
  const auto gp = hgroup::ball_volume_constant(1);
  const auto two = ExponentSet::from_sigmas({-0.5, -0.5});
  CHECK(hlp_closed_form(two, gp).value == doctest::Approx(254.456401068414530).epsilon(1e-14));
  CHECK(hilbert_closed_form(two, gp).value == doctest::Approx(104.832634511847590).epsilon(1e-14));
  CHECK(hlp_closed_form(ExponentSet::from_sigmas({-2.0}), gp).value ==
        doctest::Approx(19.7392088021787172).epsilon(1e-14));
  CHECK(hlp_closed_form(ExponentSet::from_sigmas({-1.0}), gp).value ==
        doctest::Approx(26.3189450695716230).epsilon(1e-14));
  CHECK(hilbert_closed_form(ExponentSet::from_sigmas({-2.0}), gp).value ==
        doctest::Approx(15.5031383401499101).epsilon(1e-14));
  CHECK(hilbert_closed_form(ExponentSet::from_sigmas({-1.0}), gp).value ==
        doctest::Approx(21.9247484999863161).epsilon(1e-14));
}

TEST_CASE("classical anchors") {
  const auto [h, b] = classical_anchors(2.0);
  CHECK(h == doctest::Approx(4.0));
  CHECK(b == doctest::Approx(std::numbers::pi));
  CHECK_THROWS_AS(classical_anchors(1.0), DomainError);
  for (double q : {1.5, 2.0, 3.0, 5.0}) {
    CHECK(classical_anchor_report(OperatorKind::hlp, 1, q, 1e-10).passed);
    CHECK(classical_anchor_report(OperatorKind::hilbert, 1, q, 1e-10).passed);
  }
}

TEST_CASE("beta recursion equals the gamma product") {
  const double shapes[] = {0.3, 1.7, 0.9};
  CHECK(beta_recursion(shapes, 3.5) == doctest::Approx(gamma_product(shapes, 3.5)).epsilon(1e-13));
  CHECK_THROWS_AS(beta_recursion(shapes, 2.0), DomainError);
}

TEST_CASE("HLP constant decreases away from -Q/2") {
  const auto gp = hgroup::ball_volume_constant(1);
  double prev = INFINITY;
  for (double s = -0.1; s > -2.0; s -= 0.1) {
    const double a = hlp_closed_form(ExponentSet::from_sigmas({s}), gp).value;
    CHECK(a < prev);
    prev = a;
  }
}

TEST_CASE("reconciliation reports") {
  const auto p = ParamSet::coupled(2, {3.0, 6.0}, -0.2, {0.1, 0.2}, 0.3);
  CHECK(reconcile(OperatorKind::hlp, p, 1e-8).passed);
  CHECK(reconcile(OperatorKind::hilbert, p, 1e-8).passed);
  CHECK(reconcile_beta_recursion(p, 1e-12).passed);
}

TEST_CASE("inadmissible exponents") {
  const auto gp = hgroup::ball_volume_constant(1);
  CHECK_THROWS_AS(hlp_closed_form(ExponentSet::from_sigmas({0.5}), gp), DomainError);
  CHECK_THROWS_AS(hilbert_closed_form(ExponentSet::from_sigmas({-4.5}), gp), DomainError);
  ExponentSet bad = ExponentSet::from_sigmas({-0.5});
  bad.sigma = -0.7;
  CHECK_THROWS_AS(hlp_closed_form(bad, gp), DomainError);
}

TEST_CASE("constants are symmetric in the indices") {
  const auto gp = hgroup::ball_volume_constant(2);
  const auto a = ExponentSet::from_sigmas({-0.4, -1.3, -0.2});
  const auto b = ExponentSet::from_sigmas({-1.3, -0.2, -0.4});
  CHECK(hlp_closed_form(a, gp).value == doctest::Approx(hlp_closed_form(b, gp).value).epsilon(1e-14));
  CHECK(hilbert_closed_form(a, gp).value ==
        doctest::Approx(hilbert_closed_form(b, gp).value).epsilon(1e-14));
}
