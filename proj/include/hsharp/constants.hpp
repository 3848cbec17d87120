#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsharp/hgroup.hpp"
#include "hsharp/params.hpp"
#include "hsharp/quad.hpp"
#include "hsharp/report.hpp"

namespace hsharp {

struct SharpConstant {
  OperatorKind kind = OperatorKind::hlp;
  double value = 0.0;
  std::string convention_note;
};

/// A_m = m Q omega_Q^m / ((-sigma) prod_i (Q + sigma_i)).
/// Throws DomainError unless the exponents are admissible and sigma equals
/// the sum of the sigma_i.
SharpConstant hlp_closed_form(const ExponentSet& e, const hgroup::GroupParams& gp);

/// B_m = Omega_Q^m prod_i Gamma(1 + sigma_i/Q) Gamma(-sigma/Q) / Gamma(m),
/// assembled in log space. Same domain as hlp_closed_form.
SharpConstant hilbert_closed_form(const ExponentSet& e, const hgroup::GroupParams& gp);

SharpConstant closed_form(OperatorKind kind, const ExponentSet& e, const hgroup::GroupParams& gp);

/// I(s; a_1..a_m) = int_{R_+^m} prod t_j^{a_j - 1} (1 + t_1 + ... + t_m)^{-s} dt
/// by peeling the last variable,
///   I(s; a_1..a_m) = B(a_m, s - a_m) I(s - a_m; a_1..a_{m-1}),  I(s; -) = 1.
/// Throws DomainError when a Beta argument is not positive.
double beta_recursion(std::span<const double> shapes, double outer_power);

/// The same integral as prod Gamma(a_j) Gamma(s - sum a_j) / Gamma(s).
double gamma_product(std::span<const double> shapes, double outer_power);

/// Shapes a_j = 1 + sigma_j / Q entering B_m, with outer power m.
std::vector<double> hilbert_shapes(const ExponentSet& e, int Q);

/// One-dimensional Hardy-Littlewood-Polya and Hilbert norms on L^q:
/// (q^2/(q-1), pi/sin(pi/q)). Throws DomainError for q <= 1.
std::pair<double, double> classical_anchors(double q);

/// Closed form against the quadrature oracle.
VerificationReport reconcile(OperatorKind kind, const ParamSet& p, double tolerance,
                             const quad::QuadratureSpec& spec = {});

/// Beta recursion against the Gamma product for the Hilbert shapes of p.
VerificationReport reconcile_beta_recursion(const ParamSet& p, double tolerance);

/// m = 1 anchor at alpha = gamma = 0, lambda = -1/q: closed form against
/// Omega_Q * q^2/(q-1) or Omega_Q * pi/sin(pi/q).
VerificationReport classical_anchor_report(OperatorKind kind, int n, double q, double tolerance);

void to_json(nlohmann::json& j, const SharpConstant& c);

}  // namespace hsharp
