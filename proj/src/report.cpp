#include "hsharp/report.hpp"

#include <cmath>

namespace hsharp {

void VerificationReport::evaluate() {
  abs_err = std::abs(closed_form - oracle);
  rel_err = oracle != 0.0 ? abs_err / std::abs(oracle) : abs_err;
  switch (mode) {
    case Mode::relative:
      passed = oracle != 0.0 ? rel_err <= tolerance : abs_err <= tolerance;
      break;
    case Mode::absolute:
      passed = abs_err <= tolerance;
      break;
    case Mode::upper_relative:
      passed = oracle <= closed_form * (1.0 + tolerance);
      break;
  }
  if (!std::isfinite(closed_form) || !std::isfinite(oracle)) passed = false;
}

VerificationReport make_report(std::string label, double closed_form, double oracle,
                               double tolerance, VerificationReport::Mode mode) {
  VerificationReport r;
  r.label = std::move(label);
  r.closed_form = closed_form;
  r.oracle = oracle;
  r.tolerance = tolerance;
  r.mode = mode;
  r.evaluate();
  return r;
}

std::string to_string(VerificationReport::Mode mode) {
  switch (mode) {
    case VerificationReport::Mode::relative:
      return "relative";
    case VerificationReport::Mode::absolute:
      return "absolute";
    case VerificationReport::Mode::upper_relative:
      return "upper_relative";
  }
  return "relative";
}

void to_json(nlohmann::json& j, const VerificationReport& r) {
  j = nlohmann::json{{"label", r.label},
                     {"closed_form", r.closed_form},
                     {"oracle", r.oracle},
                     {"abs_err", r.abs_err},
                     {"rel_err", r.rel_err},
                     {"tolerance", r.tolerance},
                     {"mode", to_string(r.mode)},
                     {"passed", r.passed},
                     {"convention_note", r.convention_note},
                     {"seed", r.seed},
                     {"runtime_ms", r.runtime_ms}};
  for (const auto& [k, v] : r.extra.items()) j[k] = v;
}

}  // namespace hsharp
