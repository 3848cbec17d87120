#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace hsharp {

/// One verified comparison of a closed-form value against an oracle.
struct VerificationReport {
  /// relative: |closed - oracle| / |oracle| <= tolerance (absolute when oracle = 0).
  /// absolute: |closed - oracle| <= tolerance.
  /// upper_relative: oracle <= closed (1 + tolerance); for lower-bound oracles.
  enum class Mode { relative, absolute, upper_relative };

  std::string label;
  double closed_form = 0.0;
  double oracle = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string convention_note;
  std::uint64_t seed = 0;
  std::int64_t runtime_ms = 0;
  Mode mode = Mode::relative;
  /// Command-specific fields, merged into the JSON record.
  nlohmann::json extra = nlohmann::json::object();

  /// Fills abs_err, rel_err and passed from closed_form, oracle and tolerance.
  void evaluate();
};

VerificationReport make_report(std::string label, double closed_form, double oracle,
                               double tolerance,
                               VerificationReport::Mode mode = VerificationReport::Mode::relative);

std::string to_string(VerificationReport::Mode mode);
void to_json(nlohmann::json& j, const VerificationReport& r);

}  // namespace hsharp
