#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsharp/error.hpp"
#include "hsharp/montecarlo.hpp"
#include "hsharp/morrey.hpp"
#include "hsharp/params.hpp"
#include "hsharp/quad.hpp"
#include "hsharp/report.hpp"

namespace hsharp::cli {

/// Invalid configuration; run() maps it to exit status 2.
class UsageError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

enum class Command { constant, verify_dilation, verify_sharpness, group_check, morrey_norm, oracle_compare };
enum class Format { json, csv };

std::string to_string(Command c);
/// Accepts the dashed names ("verify-dilation", ...); throws UsageError otherwise.
Command parse_command(std::string_view text);
std::string to_string(Format f);
Format parse_format(std::string_view text);

struct RunConfig {
  Command command = Command::constant;
  OperatorKind kind = OperatorKind::hlp;
  ParamSet params;
  quad::QuadratureSpec quad;
  mc::MCSpec mc;
  BallGrid grid = BallGrid::default_grid(1);
  std::string output_path;  ///< empty: the caller's stream
  Format format = Format::json;
  /// Overrides the per-command tolerance.
  std::optional<double> tolerance;
  /// (r_min, r_max) pairs for verify-sharpness.
  std::vector<std::pair<double, double>> truncations{{1e-2, 1e2}, {1e-3, 1e3}};

  /// Throws UsageError when the configuration cannot run: bad specs, csv with
  /// a command other than verify-sharpness, or parameters failing validation
  /// (strict for verify-sharpness).
  void check() const;
};

/// Every setting of a run, defaults included. First record of each report.
nlohmann::json header_record(const RunConfig& config);

/// Runs one command and writes its records: JSON lines (header, then one
/// record per report) or the CSV table. Output goes to config.output_path,
/// or to `out` when the path is empty. Returns 0 when every report passed,
/// 1 on a failed verification (records are still written), 2 on a usage
/// error, reported on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line flags into a RunConfig and calls run(). --help
/// prints usage and returns 0; parse failures return 2.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Group-law and metric properties on `triples` random triples with
/// coordinates in [-10, 10], plus Monte Carlo ball volumes against
/// Omega_Q r^Q for r in {0.5, 1, 2} and center norms {0, 1, 5}, each within
/// three standard errors.
std::vector<VerificationReport> group_check(int n, std::int64_t triples, const mc::MCSpec& mc);

struct ConvergenceRow {
  double r_min = 0.0;
  double r_max = 0.0;
  double ratio = 0.0;
  double constant = 0.0;
  double ratio_over_constant = 0.0;
};

/// One sharpness() run per truncation, in the given order.
/// Throws UsageError when p fails strict validation.
std::vector<ConvergenceRow> emit_convergence_table(
    OperatorKind kind, const ParamSet& p, const std::vector<std::pair<double, double>>& truncations,
    const BallGrid& grid, const quad::QuadratureSpec& spec, const mc::MCSpec& mc);

/// Header `r_min,r_max,ratio,constant,ratio_over_constant`, then one line per row.
void write_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

}  // namespace hsharp::cli
