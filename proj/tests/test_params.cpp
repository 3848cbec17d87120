#include "doctest.h"
#include "hsharp/params.hpp"

using namespace hsharp;

TEST_CASE("coupled parameters and exponents") {
  const auto p = ParamSet::coupled(1, {4.0, 4.0}, -0.25);
  CHECK(p.m == 2);
  CHECK(p.q == doctest::Approx(2.0));
  CHECK(p.lambda_list[0] == doctest::Approx(-0.125));
  const auto e = derive_exponents(p);
  CHECK(e.sigma_list[0] == doctest::Approx(-0.5));
  CHECK(e.sigma == doctest::Approx(-1.0));
  CHECK(admissible(e, p.Q()));
  CHECK(validate(p, true).ok());
}

TEST_CASE("sigma includes the weights") {
  auto p = ParamSet::coupled(1, {3.0}, -0.2, {0.6}, 0.5);
  const auto e = derive_exponents(p);
  // 4 (-0.2) - 0.6/3 + 0.5 (-0.2 + 1/3)
  CHECK(e.sigma == doctest::Approx(-0.8 - 0.2 + 0.5 * (-0.2 + 1.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("validation names the violated condition") {
  auto p = ParamSet::coupled(1, {2.0}, -0.25);
  p.lambda = 0.0;
  p.lambda_list = {0.0};
  auto v = validate(p, false);
  CHECK_FALSE(v.ok());
  CHECK(v.has("lambda_range"));

  auto big = ParamSet::coupled(1, {2.0}, -0.25, {-10.0});
  CHECK(validate(big, false).has("sigma_negative"));

  auto sizes = ParamSet::coupled(1, {4.0, 4.0}, -0.25);
  sizes.gamma_list = {0.0};
  CHECK(validate(sizes, false).has("list_size"));

  auto alpha = ParamSet::coupled(1, {2.0}, -0.25, {}, -5.0);
  CHECK(validate(alpha, false).has("alpha_range"));
}

TEST_CASE("relaxing strict sharpness never rejects more") {
  auto p = ParamSet::coupled(1, {2.0}, -0.5);  // lambda_j = -1/q_j: only non-strict
  CHECK(validate(p, false).ok());
  CHECK_FALSE(validate(p, true).ok());
  CHECK(validate(p, true).has("lambdaj_open"));
}

TEST_CASE("json round trip") {
  const auto p = ParamSet::coupled(2, {3.0, 6.0}, -0.3, {0.1, -0.1}, 0.25);
  nlohmann::json j = p;
  const auto back = j.get<ParamSet>();
  CHECK(back.q_list == p.q_list);
  CHECK(back.lambda_list == p.lambda_list);
  CHECK(back.alpha == p.alpha);
  CHECK(parse_operator_kind("hilbert") == OperatorKind::hilbert);
}

TEST_CASE("coupled lists sum to the totals") {
  const auto p = ParamSet::coupled(2, {3.0, 4.5, 9.0}, -0.37, {0.2, -0.1, 0.3}, 0.6);
  double lsum = 0.0;
  for (double l : p.lambda_list) lsum += l;
  CHECK(lsum == doctest::Approx(p.lambda).epsilon(1e-10));
  const auto e = derive_exponents(p);
  CHECK(e.sigma_sum() == doctest::Approx(e.sigma).epsilon(1e-10));
}
