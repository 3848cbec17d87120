#include "hsharp/params.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "hsharp/error.hpp"

namespace hsharp {
namespace {

constexpr double kCouplingTol = 1e-12;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(OperatorKind kind) {
  return kind == OperatorKind::hlp ? "hlp" : "hilbert";
}

OperatorKind parse_operator_kind(std::string_view text) {
  if (text == "hlp") return OperatorKind::hlp;
  if (text == "hilbert") return OperatorKind::hilbert;
  throw InvalidInput("unknown operator kind '" + std::string(text) + "'");
}

double ParamSet::gamma_total() const {
  return std::accumulate(gamma_list.begin(), gamma_list.end(), 0.0);
}

ParamSet ParamSet::coupled(int n, std::vector<double> q_list, double lambda,
                           std::vector<double> gamma_list, double alpha) {
  ParamSet p;
  p.m = static_cast<int>(q_list.size());
  p.n = n;
  double inv = 0.0;
  for (double qj : q_list) inv += 1.0 / qj;
  p.q = 1.0 / inv;
  p.lambda = lambda;
  p.lambda_list.clear();
  for (double qj : q_list) p.lambda_list.push_back(p.q * lambda / qj);
  p.q_list = std::move(q_list);
  if (gamma_list.empty()) gamma_list.assign(p.q_list.size(), 0.0);
  p.gamma_list = std::move(gamma_list);
  p.alpha = alpha;
  return p;
}

double ExponentSet::sigma_sum() const {
  return std::accumulate(sigma_list.begin(), sigma_list.end(), 0.0);
}

ExponentSet ExponentSet::from_sigmas(std::vector<double> sigma_list) {
  ExponentSet e;
  e.sigma_list = std::move(sigma_list);
  e.sigma = e.sigma_sum();
  return e;
}

ExponentSet derive_exponents(const ParamSet& p) {
  if (p.q_list.size() != static_cast<std::size_t>(p.m) ||
      p.lambda_list.size() != static_cast<std::size_t>(p.m) ||
      p.gamma_list.size() != static_cast<std::size_t>(p.m)) {
    throw InvalidInput("derive_exponents: parameter lists must have m entries");
  }
  const double Q = p.Q();
  ExponentSet e;
  for (int j = 0; j < p.m; ++j) {
    e.sigma_list.push_back(Q * p.lambda_list[j] - p.gamma_list[j] / p.q +
                           p.alpha * (p.lambda_list[j] + 1.0 / p.q_list[j]));
  }
  e.sigma = Q * p.lambda - p.gamma_total() / p.q + p.alpha * (p.lambda + 1.0 / p.q);
  return e;
}

bool admissible(const ExponentSet& e, int Q) {
  if (e.sigma_list.empty()) return false;
  if (!(e.sigma < 0.0) || !(e.sigma_sum() < 0.0)) return false;
  for (double s : e.sigma_list) {
    if (!(Q + s > 0.0)) return false;
  }
  return true;
}

bool ValidationResult::has(std::string_view code) const {
  for (const auto& v : violations) {
    if (v.code == code) return true;
  }
  return false;
}

std::string ValidationResult::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.code + ": " + v.message;
  }
  return out;
}

ValidationResult validate(const ParamSet& p, bool strict_sharpness) {
  ValidationResult r;
  auto fail = [&r](std::string code, std::string msg) {
    r.violations.push_back({std::move(code), std::move(msg)});
  };

  if (p.m < 1) fail("m_range", "m must be a positive integer");
  if (p.n < 1) fail("n_range", "n must be a positive integer");
  const auto m = static_cast<std::size_t>(std::max(p.m, 0));
  if (p.q_list.size() != m || p.lambda_list.size() != m || p.gamma_list.size() != m) {
    fail("list_size", "q_j, lambda_j and gamma_j lists must each have m entries");
    return r;
  }
  bool finite = std::isfinite(p.q) && std::isfinite(p.lambda) && std::isfinite(p.alpha);
  for (std::size_t j = 0; j < m; ++j) {
    finite = finite && std::isfinite(p.q_list[j]) && std::isfinite(p.lambda_list[j]) &&
             std::isfinite(p.gamma_list[j]);
  }
  if (!finite) {
    fail("non_finite", "all parameters must be finite");
    return r;
  }
  if (r.has("m_range") || r.has("n_range")) return r;

  const double Q = p.Q();
  if (!(p.q >= 1.0)) fail("q_range", "q must be >= 1, got " + fmt(p.q));
  double inv = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (!(p.q_list[j] > 1.0)) {
      fail("qj_range", "q_" + std::to_string(j + 1) + " must be > 1, got " + fmt(p.q_list[j]));
    }
    inv += 1.0 / p.q_list[j];
  }
  if (std::abs(1.0 / p.q - inv) > kCouplingTol) {
    fail("harmonic_sum", "1/q must equal the sum of 1/q_j");
  }
  if (!(p.lambda < 0.0)) {
    fail("lambda_range", "lambda must be negative, got " + fmt(p.lambda));
  } else if (p.lambda < -1.0 / p.q) {
    fail("lambda_range", "lambda must be >= -1/q, got " + fmt(p.lambda));
  }
  for (std::size_t j = 0; j < m; ++j) {
    const double lj = p.lambda_list[j];
    const double qj = p.q_list[j];
    const std::string name = "lambda_" + std::to_string(j + 1);
    if (!(lj < 0.0) || lj < -1.0 / qj) {
      fail("lambdaj_range", name + " must lie in [-1/q_j, 0), got " + fmt(lj));
    } else if (strict_sharpness && !(lj > -1.0 / qj)) {
      fail("lambdaj_open", name + " must lie in (-1/q_j, 0) for sharpness");
    }
    if (strict_sharpness && std::abs(p.q * p.lambda - qj * lj) > kCouplingTol) {
      fail("sharpness_coupling", "q lambda must equal q_j lambda_j for j = " +
                                     std::to_string(j + 1));
    }
  }
  if (!(p.alpha > -Q)) {
    fail("alpha_range", "alpha must exceed -Q = " + fmt(-Q) + ", got " + fmt(p.alpha));
  }

  const ExponentSet e = derive_exponents(p);
  if (!(e.sigma < 0.0)) {
    fail("sigma_negative", "sigma = Q lambda - gamma/q + alpha(lambda + 1/q) must be negative, got " +
                               fmt(e.sigma));
  }
  if (!(e.sigma_sum() < 0.0) && e.sigma < 0.0) {
    fail("sigma_sum_negative", "sum of sigma_j must be negative, got " + fmt(e.sigma_sum()));
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!(Q + e.sigma_list[j] > 0.0)) {
      fail("local_integrability", "Q + sigma_" + std::to_string(j + 1) +
                                      " must be positive, got " + fmt(Q + e.sigma_list[j]));
    }
  }
  return r;
}

void to_json(nlohmann::json& j, const ParamSet& p) {
  j = nlohmann::json{{"m", p.m},
                     {"n", p.n},
                     {"q", p.q},
                     {"q_list", p.q_list},
                     {"lambda", p.lambda},
                     {"lambda_list", p.lambda_list},
                     {"gamma_list", p.gamma_list},
                     {"alpha", p.alpha}};
}

void from_json(const nlohmann::json& j, ParamSet& p) {
  try {
    j.at("m").get_to(p.m);
    j.at("n").get_to(p.n);
    j.at("q").get_to(p.q);
    j.at("q_list").get_to(p.q_list);
    j.at("lambda").get_to(p.lambda);
    j.at("lambda_list").get_to(p.lambda_list);
    j.at("gamma_list").get_to(p.gamma_list);
    j.at("alpha").get_to(p.alpha);
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidInput(std::string("ParamSet JSON: ") + ex.what());
  }
}

void to_json(nlohmann::json& j, const ExponentSet& e) {
  j = nlohmann::json{{"sigma_list", e.sigma_list}, {"sigma", e.sigma}};
}

}  // namespace hsharp
