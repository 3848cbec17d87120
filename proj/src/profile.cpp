#include "hsharp/profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsharp/error.hpp"

namespace hsharp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log(double r) { return r <= 0.0 ? -kInf : std::log(r); }

}  // namespace

double log1mexp(double x) {
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  if (a == kInf || b == kInf) return kInf;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_power_integral(double log_coeff, double k, double la, double lb) {
  if (!(la < lb)) return -kInf;
  const double e = k + 1.0;
  if (e > 0.0) {
    if (lb == kInf) return kInf;
    const double head = log_coeff - std::log(e) + e * lb;
    if (la == -kInf) return head;
    return head + log1mexp(e * (la - lb));
  }
  if (e < 0.0) {
    if (la == -kInf) return kInf;
    const double head = log_coeff - std::log(-e) + e * la;
    if (lb == kInf) return head;
    return head + log1mexp(e * (lb - la));
  }
  if (la == -kInf || lb == kInf) return kInf;
  return log_coeff + std::log(lb - la);
}

RadialProfile RadialProfile::power(double exponent, double coefficient) {
  if (!std::isfinite(exponent) || !std::isfinite(coefficient) || coefficient < 0.0) {
    throw InvalidInput("power profile: exponent and coefficient must be finite, coefficient >= 0");
  }
  RadialProfile f;
  f.kind_ = Kind::power;
  f.exponent_ = exponent;
  f.coefficient_ = coefficient;
  f.finalize();
  return f;
}

RadialProfile RadialProfile::truncated_power(double exponent, double r_min, double r_max,
                                             double coefficient) {
  if (!std::isfinite(exponent) || !std::isfinite(coefficient) || coefficient < 0.0) {
    throw InvalidInput("truncated power profile: bad exponent or coefficient");
  }
  if (!(r_min >= 0.0) || !(r_min < r_max) || !std::isfinite(r_max)) {
    throw InvalidInput("truncated power profile: need 0 <= r_min < r_max < inf");
  }
  RadialProfile f;
  f.kind_ = Kind::truncated_power;
  f.exponent_ = exponent;
  f.coefficient_ = coefficient;
  f.r_min_ = r_min;
  f.r_max_ = r_max;
  f.finalize();
  return f;
}

RadialProfile RadialProfile::tabulated(std::vector<double> knots, std::vector<double> values,
                                       Extrapolation extrapolation) {
  if (knots.empty() || knots.size() != values.size()) {
    throw InvalidInput("tabulated profile: knots and values must be non-empty and equal length");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i] > 0.0) || !std::isfinite(knots[i])) {
      throw InvalidInput("tabulated profile: knots must be positive and finite");
    }
    if (i > 0 && !(knots[i] > knots[i - 1])) {
      throw InvalidInput("tabulated profile: knots must be strictly increasing");
    }
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw InvalidInput("tabulated profile: values must be finite and nonnegative");
    }
  }
  if (!(extrapolation.lo_cutoff >= 0.0) || std::isnan(extrapolation.hi_cutoff)) {
    throw InvalidInput("tabulated profile: bad extrapolation cutoffs");
  }
  RadialProfile f;
  f.kind_ = Kind::tabulated;
  f.knots_ = std::move(knots);
  f.values_ = std::move(values);
  f.extrapolation_ = extrapolation;
  f.r_min_ = f.knots_.front();
  f.r_max_ = f.knots_.back();
  f.finalize();
  return f;
}

RadialProfile RadialProfile::zero() { return power(0.0, 0.0); }

void RadialProfile::finalize() {
  segments_.clear();
  auto push = [this](double lo, double hi, double log_coeff, double exponent) {
    segments_.push_back({lo, hi, log_coeff, exponent, safe_log(lo), safe_log(hi)});
  };
  switch (kind_) {
    case Kind::power:
      if (coefficient_ > 0.0) push(0.0, kInf, std::log(coefficient_), exponent_);
      break;
    case Kind::truncated_power:
      if (coefficient_ > 0.0) push(r_min_, r_max_, std::log(coefficient_), exponent_);
      break;
    case Kind::tabulated: {
      const std::size_t n = knots_.size();
      auto slope = [this](std::size_t i) {
        return (std::log(values_[i + 1]) - std::log(values_[i])) /
               (std::log(knots_[i + 1]) - std::log(knots_[i]));
      };
      auto through = [this](std::size_t i, double p) {
        return std::log(values_[i]) - p * std::log(knots_[i]);
      };
      if (extrapolation_.lo_cutoff < knots_[0] && values_[0] > 0.0) {
        const double p = (n >= 2 && values_[1] > 0.0) ? slope(0) : 0.0;
        push(extrapolation_.lo_cutoff, knots_[0], through(0, p), p);
      }
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (values_[i] > 0.0 && values_[i + 1] > 0.0) {
          const double p = slope(i);
          push(knots_[i], knots_[i + 1], through(i, p), p);
        }
      }
      if (extrapolation_.hi_cutoff > knots_[n - 1] && values_[n - 1] > 0.0) {
        const double p = (n >= 2 && values_[n - 2] > 0.0) ? slope(n - 2) : 0.0;
        push(knots_[n - 1], extrapolation_.hi_cutoff, through(n - 1, p), p);
      }
      break;
    }
  }
}

double RadialProfile::log_value_at_log(double u) const {
  // Segments are sorted and disjoint; the last one is closed on the right.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), u,
                             [](double v, const Segment& s) { return v < s.log_lo; });
  if (it == segments_.begin()) return -kInf;
  const Segment& s = *std::prev(it);
  const bool last = std::next(std::prev(it)) == segments_.end();
  if (u < s.log_hi || (last && u == s.log_hi)) return s.log_coeff + s.exponent * u;
  return -kInf;
}

double RadialProfile::operator()(double r) const {
  if (r < 0.0 || std::isnan(r)) throw InvalidInput("profile evaluated at a negative radius");
  if (r == 0.0) {
    if (segments_.empty() || segments_.front().lo > 0.0) return 0.0;
    const Segment& s = segments_.front();
    if (s.exponent < 0.0) return kInf;
    return s.exponent == 0.0 ? std::exp(s.log_coeff) : 0.0;
  }
  const double lv = log_value_at_log(std::log(r));
  return lv == -kInf ? 0.0 : std::exp(lv);
}

std::vector<double> RadialProfile::breakpoints() const {
  std::vector<double> out;
  for (const auto& s : segments_) {
    if (s.lo > 0.0) out.push_back(s.lo);
    if (std::isfinite(s.hi)) out.push_back(s.hi);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double RadialProfile::support_lo() const {
  return segments_.empty() ? 0.0 : segments_.front().lo;
}

double RadialProfile::support_hi() const {
  return segments_.empty() ? 0.0 : segments_.back().hi;
}

double RadialProfile::moment(double lo, double hi, double power, double p) const {
  if (!(lo >= 0.0) || !(hi >= lo) || !(power > 0.0)) {
    throw InvalidInput("moment: need 0 <= lo <= hi and power > 0");
  }
  double total = 0.0;
  const double llo = safe_log(lo);
  const double lhi = safe_log(hi);
  for (const auto& s : segments_) {
    const double la = std::max(llo, s.log_lo);
    const double lb = std::min(lhi, s.log_hi);
    if (!(la < lb)) continue;
    const double lv = log_power_integral(power * s.log_coeff, power * s.exponent + p, la, lb);
    if (lv == kInf) {
      throw DivergenceError("moment: integral of r^" + std::to_string(power * s.exponent + p) +
                            " diverges at " + (la == -kInf ? std::string("r = 0") :
                                                             std::string("r = inf")));
    }
    total += std::exp(lv);
  }
  return total;
}

std::optional<double> RadialProfile::origin_exponent() const {
  if (segments_.empty() || segments_.front().lo > 0.0) return std::nullopt;
  return segments_.front().exponent;
}

RadialProfile RadialProfile::dilated(double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidInput("dilated: t must be positive");
  switch (kind_) {
    case Kind::power:
      return power(exponent_, coefficient_ * std::pow(t, exponent_));
    case Kind::truncated_power:
      return truncated_power(exponent_, r_min_ / t, r_max_ / t,
                             coefficient_ * std::pow(t, exponent_));
    case Kind::tabulated: {
      std::vector<double> k = knots_;
      for (double& v : k) v /= t;
      return tabulated(std::move(k), values_,
                       {extrapolation_.lo_cutoff / t, extrapolation_.hi_cutoff / t});
    }
  }
  return *this;
}

RadialProfile RadialProfile::scaled(double c) const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidInput("scaled: c must be >= 0");
  switch (kind_) {
    case Kind::power:
      return power(exponent_, coefficient_ * c);
    case Kind::truncated_power:
      return truncated_power(exponent_, r_min_, r_max_, coefficient_ * c);
    case Kind::tabulated: {
      std::vector<double> v = values_;
      for (double& x : v) x *= c;
      return tabulated(knots_, std::move(v), extrapolation_);
    }
  }
  return *this;
}

CumulativeMass::CumulativeMass(const RadialProfile& f, int Q)
    : segments_(f.segments()), Q_(Q) {
  log_prefix_.assign(segments_.size() + 1, -kInf);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    log_prefix_[i + 1] = log_add(
        log_prefix_[i], log_power_integral(s.log_coeff, s.exponent + Q_ - 1, s.log_lo, s.log_hi));
  }
}

double CumulativeMass::log_mass_at_log(double u) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), u,
                             [](double v, const RadialProfile::Segment& s) { return v < s.log_lo; });
  const auto i = static_cast<std::size_t>(it - segments_.begin());
  if (i == 0) return -kInf;
  const auto& s = segments_[i - 1];
  const double partial =
      log_power_integral(s.log_coeff, s.exponent + Q_ - 1, s.log_lo, std::min(u, s.log_hi));
  return log_add(log_prefix_[i - 1], partial);
}

double CumulativeMass::mass(double R) const {
  return std::exp(log_mass_at_log(safe_log(R)));
}

void to_json(nlohmann::json& j, const RadialProfile& f) {
  switch (f.kind()) {
    case RadialProfile::Kind::power:
      j = {{"kind", "power"}, {"exponent", f.exponent()}, {"coefficient", f.coefficient()}};
      break;
    case RadialProfile::Kind::truncated_power:
      j = {{"kind", "truncated_power"}, {"exponent", f.exponent()},
           {"r_min", f.r_min()},        {"r_max", f.r_max()},
           {"coefficient", f.coefficient()}};
      break;
    case RadialProfile::Kind::tabulated:
      j = {{"kind", "tabulated"},
           {"knots", f.knots()},
           {"values", f.values()},
           {"lo_cutoff", f.extrapolation().lo_cutoff},
           {"hi_cutoff", f.extrapolation().hi_cutoff}};
      break;
  }
}

RadialProfile profile_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "power") {
      return RadialProfile::power(j.at("exponent").get<double>(),
                                  j.value("coefficient", 1.0));
    }
    if (kind == "truncated_power") {
      return RadialProfile::truncated_power(j.at("exponent").get<double>(),
                                            j.at("r_min").get<double>(),
                                            j.at("r_max").get<double>(),
                                            j.value("coefficient", 1.0));
    }
    if (kind == "tabulated") {
      return RadialProfile::tabulated(j.at("knots").get<std::vector<double>>(),
                                      j.at("values").get<std::vector<double>>(),
                                      {j.value("lo_cutoff", 0.0), j.value("hi_cutoff", 0.0)});
    }
    throw InvalidInput("unknown profile kind '" + kind + "'");
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidInput(std::string("profile JSON: ") + ex.what());
  }
}

}  // namespace hsharp
