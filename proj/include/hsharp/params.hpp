#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace hsharp {

enum class OperatorKind { hlp, hilbert };

std::string to_string(OperatorKind kind);
/// Accepts "hlp" and "hilbert"; throws InvalidInput otherwise.
OperatorKind parse_operator_kind(std::string_view text);

/// Every exponent of the weighted Morrey setting. Lists have m entries.
struct ParamSet {
  int m = 1;
  int n = 1;
  double q = 2.0;
  std::vector<double> q_list{2.0};
  double lambda = -0.5;
  std::vector<double> lambda_list{-0.5};
  std::vector<double> gamma_list{0.0};
  double alpha = 0.0;

  int Q() const { return 2 * n + 2; }
  /// gamma = gamma_1 + ... + gamma_m.
  double gamma_total() const;

  /// Parameters satisfying the coupling q lambda = q_j lambda_j, with
  /// lambda_j derived from lambda. Empty gamma_list means all zeros.
  static ParamSet coupled(int n, std::vector<double> q_list, double lambda,
                          std::vector<double> gamma_list = {}, double alpha = 0.0);
};

/// Scaling exponents of the extremizers:
///   sigma_j = Q lambda_j - gamma_j / q + alpha (lambda_j + 1/q_j)
///   sigma   = Q lambda   - gamma   / q + alpha (lambda   + 1/q)
struct ExponentSet {
  std::vector<double> sigma_list;
  double sigma = 0.0;

  int m() const { return static_cast<int>(sigma_list.size()); }
  double sigma_sum() const;
  /// sigma taken as the sum of the list.
  static ExponentSet from_sigmas(std::vector<double> sigma_list);
};

ExponentSet derive_exponents(const ParamSet& p);

/// sigma < 0 and Q + sigma_j > 0 for every j (with sigma consistent with the list sum).
bool admissible(const ExponentSet& e, int Q);

struct Violation {
  std::string code;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const;
  /// "code: message; code: message".
  std::string summary() const;
};

/// Collects every violated admissibility condition; never throws.
/// Condition codes: m_range, n_range, list_size, q_range, qj_range,
/// harmonic_sum, lambda_range, lambdaj_range, alpha_range, sigma_negative,
/// sigma_sum_negative, local_integrability, non_finite, and with
/// strict_sharpness lambdaj_open and sharpness_coupling.
ValidationResult validate(const ParamSet& p, bool strict_sharpness);

void to_json(nlohmann::json& j, const ParamSet& p);
void from_json(const nlohmann::json& j, ParamSet& p);
void to_json(nlohmann::json& j, const ExponentSet& e);

}  // namespace hsharp
