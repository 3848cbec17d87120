#include "hsharp/constants.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hsharp/error.hpp"
#include "hsharp/specfun.hpp"

namespace hsharp {
namespace {

constexpr double kSumTol = 1e-10;

const char* const kHlpNote =
    "A_m = mQ omega_Q^m / ((-sigma) prod (Q + sigma_i)); the sign-flipped brackets "
    "[Q lambda - gamma/q + alpha(lambda + 1/q)] and [Q(1 - lambda_i) + gamma_i/q - "
    "alpha(lambda_i + 1/q_i)] are sigma and Q - sigma_i, which give a negative value; the "
    "signs used here are the ones fixed by the region quadrature";
const char* const kHilbertNote =
    "B_m = Omega_Q^m prod Gamma(1 + sigma_i/Q) Gamma(-sigma/Q) / Gamma(m); the sign-flipped "
    "form prod Gamma(1 - sigma_i/Q) Gamma(sigma/Q) disagrees with the iterated quadrature, which "
    "fixes the signs used here; Omega_Q is the unit-ball volume";

void require_admissible(const ExponentSet& e, int Q, const char* what) {
  if (e.sigma_list.empty()) throw DomainError(std::string(what) + ": empty exponent list");
  if (std::abs(e.sigma - e.sigma_sum()) > kSumTol * std::max(1.0, std::abs(e.sigma))) {
    throw DomainError(std::string(what) + ": sigma differs from the sum of sigma_j");
  }
  if (!admissible(e, Q)) {
    std::ostringstream os;
    os << what << ": inadmissible exponents (need sigma < 0 and Q + sigma_j > 0), sigma = "
       << e.sigma;
    throw DomainError(os.str());
  }
}

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               t0)
      .count();
}

}  // namespace

SharpConstant hlp_closed_form(const ExponentSet& e, const hgroup::GroupParams& gp) {
  require_admissible(e, gp.Q, "hlp_closed_form");
  const int m = e.m();
  const double Q = gp.Q;
  double log_denominator = std::log(-e.sigma);
  for (double s : e.sigma_list) log_denominator += std::log(Q + s);
  const double value =
      std::exp(std::log(m * Q) + m * std::log(gp.omega_Q) - log_denominator);
  return {OperatorKind::hlp, value, kHlpNote};
}

SharpConstant hilbert_closed_form(const ExponentSet& e, const hgroup::GroupParams& gp) {
  require_admissible(e, gp.Q, "hilbert_closed_form");
  const int m = e.m();
  const double Q = gp.Q;
  double log_value = m * std::log(gp.Omega_Q) + specfun::log_gamma(-e.sigma / Q) -
                     specfun::log_gamma(m);
  for (double s : e.sigma_list) log_value += specfun::log_gamma(1.0 + s / Q);
  return {OperatorKind::hilbert, std::exp(log_value), kHilbertNote};
}

SharpConstant closed_form(OperatorKind kind, const ExponentSet& e, const hgroup::GroupParams& gp) {
  return kind == OperatorKind::hlp ? hlp_closed_form(e, gp) : hilbert_closed_form(e, gp);
}

double beta_recursion(std::span<const double> shapes, double outer_power) {
  double value = 1.0;
  double s = outer_power;
  for (std::size_t k = shapes.size(); k-- > 0;) {
    const double a = shapes[k];
    if (!(a > 0.0) || !(s - a > 0.0)) {
      std::ostringstream os;
      os << "beta_recursion: nonpositive Beta argument B(" << a << ", " << s - a << ")";
      throw DomainError(os.str());
    }
    value *= specfun::beta(a, s - a);
    s -= a;
  }
  return value;
}

double gamma_product(std::span<const double> shapes, double outer_power) {
  const double rest = outer_power - std::accumulate(shapes.begin(), shapes.end(), 0.0);
  double log_value = specfun::log_gamma(rest) - specfun::log_gamma(outer_power);
  for (double a : shapes) log_value += specfun::log_gamma(a);
  return std::exp(log_value);
}

std::vector<double> hilbert_shapes(const ExponentSet& e, int Q) {
  std::vector<double> a;
  for (double s : e.sigma_list) a.push_back(1.0 + s / Q);
  return a;
}

std::pair<double, double> classical_anchors(double q) {
  if (!(q > 1.0) || !std::isfinite(q)) throw DomainError("classical_anchors: q must exceed 1");
  return {q * q / (q - 1.0), std::numbers::pi / std::sin(std::numbers::pi / q)};
}

VerificationReport reconcile(OperatorKind kind, const ParamSet& p, double tolerance,
                             const quad::QuadratureSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto gp = hgroup::ball_volume_constant(p.n);
  const ExponentSet e = derive_exponents(p);
  const SharpConstant c = closed_form(kind, e, gp);
  const double oracle = kind == OperatorKind::hlp ? quad::hlp_constant_oracle(e, gp, spec)
                                                  : quad::hilbert_constant_oracle(e, gp, spec);
  VerificationReport r =
      make_report(to_string(kind) + " closed form vs quadrature", c.value, oracle, tolerance);
  r.convention_note = c.convention_note;
  r.extra["kind"] = to_string(kind);
  r.extra["params"] = p;
  r.extra["exponents"] = e;
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

VerificationReport reconcile_beta_recursion(const ParamSet& p, double tolerance) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExponentSet e = derive_exponents(p);
  const auto shapes = hilbert_shapes(e, p.Q());
  const double outer = e.m();
  VerificationReport r = make_report("beta recursion vs gamma product",
                                     gamma_product(shapes, outer),
                                     beta_recursion(shapes, outer), tolerance);
  r.extra["params"] = p;
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

VerificationReport classical_anchor_report(OperatorKind kind, int n, double q, double tolerance) {
  const auto t0 = std::chrono::steady_clock::now();
  const ParamSet p = ParamSet::coupled(n, {q}, -1.0 / q);
  const auto gp = hgroup::ball_volume_constant(n);
  const SharpConstant c = closed_form(kind, derive_exponents(p), gp);
  const auto [hlp_1d, hilbert_1d] = classical_anchors(q);
  const double anchor = gp.Omega_Q * (kind == OperatorKind::hlp ? hlp_1d : hilbert_1d);
  VerificationReport r = make_report(to_string(kind) + " classical anchor", c.value, anchor,
                                     tolerance);
  r.convention_note = c.convention_note;
  r.extra["kind"] = to_string(kind);
  r.extra["q"] = q;
  r.extra["n"] = n;
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

void to_json(nlohmann::json& j, const SharpConstant& c) {
  j = nlohmann::json{
      {"kind", to_string(c.kind)}, {"value", c.value}, {"convention_note", c.convention_note}};
}

}  // namespace hsharp
