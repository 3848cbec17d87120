#include "hsharp/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "hsharp/constants.hpp"
#include "hsharp/operators.hpp"

namespace hsharp::cli {
namespace {

using hgroup::HPoint;

constexpr double kOracleTolerance = 1e-8;
constexpr double kBetaTolerance = 1e-12;
constexpr double kDilationTolerance = 1e-10;
constexpr double kSharpnessTolerance = 1e-3;
constexpr double kExactTolerance = 1e-12;
constexpr double kGroupTolerance = 1e-10;   // absolute, coordinates in [-10, 10]
constexpr double kScalingTolerance = 1e-12; // relative
constexpr std::uint64_t kGroupStream = 0x67726f7570ULL;

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
      .count();
}

double tol_or(const RunConfig& c, double fallback) { return c.tolerance.value_or(fallback); }

std::vector<VerificationReport> run_constant(const RunConfig& c) {
  auto r = reconcile(c.kind, c.params, tol_or(c, kOracleTolerance), c.quad);
  r.label = "constant " + to_string(c.kind);
  return {r};
}

std::vector<VerificationReport> run_oracle_compare(const RunConfig& c) {
  const double tol = tol_or(c, kOracleTolerance);
  std::vector<VerificationReport> out;
  out.push_back(reconcile(OperatorKind::hlp, c.params, tol, c.quad));
  out.push_back(reconcile(OperatorKind::hilbert, c.params, tol, c.quad));
  out.push_back(reconcile_beta_recursion(c.params, tol_or(c, kBetaTolerance)));
  if (c.params.m == 1 && c.params.alpha == 0.0 && c.params.gamma_list[0] == 0.0 &&
      std::abs(c.params.lambda * c.params.q + 1.0) < 1e-12) {
    out.push_back(classical_anchor_report(OperatorKind::hlp, c.params.n, c.params.q, 1e-10));
    out.push_back(classical_anchor_report(OperatorKind::hilbert, c.params.n, c.params.q, 1e-10));
  }
  return out;
}

// The spaces of a parameter set paired with the extremizer exponent that lives there.
struct SpaceCase {
  std::string name;
  MorreySpaceSpec space;
  double sigma = 0.0;
};

std::vector<SpaceCase> space_cases(const ParamSet& p) {
  const auto e = derive_exponents(p);
  std::vector<SpaceCase> out;
  for (int j = 1; j <= p.m; ++j) {
    out.push_back({"source " + std::to_string(j), source_space(p, j), e.sigma_list[j - 1]});
  }
  out.push_back({"target", target_space(p), e.sigma});
  return out;
}

// |x|^sigma has finite cell integrals iff lambda > -1/q; the endpoint case
// is cut off at both ends.
RadialProfile dilation_profile(const SpaceCase& s) {
  if (s.space.lambda > -1.0 / s.space.q) return RadialProfile::power(s.sigma);
  return RadialProfile::truncated_power(s.sigma, 1e-3, 1e3);
}

std::vector<VerificationReport> run_verify_dilation(const RunConfig& c) {
  const auto gp = hgroup::ball_volume_constant(c.params.n);
  std::vector<VerificationReport> out;
  for (const auto& s : space_cases(c.params)) {
    for (double t : {0.5, 2.0, 10.0}) {
      auto r = verify_dilation(dilation_profile(s), t, s.space, c.grid, gp, c.mc,
                               tol_or(c, kDilationTolerance));
      r.label = "dilation " + s.name;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<VerificationReport> run_morrey_norm(const RunConfig& c) {
  const auto gp = hgroup::ball_volume_constant(c.params.n);
  std::vector<VerificationReport> out;
  for (const auto& s : space_cases(c.params)) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto est = morrey_norm(RadialProfile::power(s.sigma), s.space, c.grid, gp, c.mc);
    // Origin balls: w_1 = omega R^{Q+alpha}/(Q+alpha) and the |x|^{q sigma + gamma_w}
    // integral omega R^k / k with k = q sigma + gamma_w + Q, so the cell value is R-free.
    const double k = s.space.q * s.sigma + s.space.gamma_w + gp.Q;
    const double p = s.space.lambda + 1.0 / s.space.q;
    const double exact = std::exp(-p * std::log(gp.omega_Q / (gp.Q + s.space.alpha)) +
                                  std::log(gp.omega_Q / k) / s.space.q);
    auto r = make_report("morrey norm " + s.name, exact, est.origin_value(),
                         tol_or(c, kExactTolerance));
    r.convention_note =
        "closed form of the origin-centered cells of |x|^sigma; estimate is the grid maximum, a "
        "lower bound of the supremum";
    r.seed = c.mc.seed;
    r.extra = {{"space", s.space}, {"sigma", s.sigma}, {"estimate", est}};
    r.runtime_ms = elapsed_ms(t0);
    out.push_back(std::move(r));
  }
  return out;
}

VerificationReport monotone_report(const std::vector<ConvergenceRow>& rows) {
  double worst_drop = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    worst_drop = std::max(worst_drop, rows[i - 1].ratio - rows[i].ratio);
  }
  auto r = make_report("sharpness ratio nondecreasing in truncation width", 0.0, worst_drop, 0.0,
                       VerificationReport::Mode::absolute);
  r.convention_note = "oracle is the largest decrease of the ratio between consecutive widths";
  return r;
}

std::vector<VerificationReport> run_verify_sharpness(const RunConfig& c) {
  std::vector<VerificationReport> out;
  std::vector<ConvergenceRow> rows;
  for (const auto& w : c.truncations) {
    auto r = sharpness_ratio(c.kind, c.params, w, c.grid, c.quad, c.mc,
                             tol_or(c, kSharpnessTolerance));
    rows.push_back({w.first, w.second, r.oracle, r.closed_form, r.oracle / r.closed_form});
    out.push_back(std::move(r));
  }
  if (rows.size() > 1) {
    auto m = monotone_report(rows);
    m.seed = c.mc.seed;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<VerificationReport> dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::constant: return run_constant(c);
    case Command::oracle_compare: return run_oracle_compare(c);
    case Command::verify_dilation: return run_verify_dilation(c);
    case Command::verify_sharpness: return run_verify_sharpness(c);
    case Command::morrey_norm: return run_morrey_norm(c);
    case Command::group_check: return group_check(c.params.n, c.mc.samples, c.mc);
  }
  throw UsageError("unknown command");
}

HPoint random_point(int n, mc::CounterRng& rng) {
  std::vector<double> c(static_cast<std::size_t>(2 * n + 1));
  for (double& v : c) v = rng.uniform(-10.0, 10.0);
  return HPoint(n, std::move(c));
}

double point_gap(const HPoint& a, const HPoint& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

std::vector<std::pair<double, double>> parse_truncations(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  if (text.empty() || text == "none") return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("--truncations expects r_min:r_max pairs");
    try {
      out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw UsageError("--truncations: cannot parse '" + item + "'");
    }
  }
  return out;
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::constant: return "constant";
    case Command::verify_dilation: return "verify-dilation";
    case Command::verify_sharpness: return "verify-sharpness";
    case Command::group_check: return "group-check";
    case Command::morrey_norm: return "morrey-norm";
    case Command::oracle_compare: return "oracle-compare";
  }
  return "unknown";
}

Command parse_command(std::string_view text) {
  for (auto c : {Command::constant, Command::verify_dilation, Command::verify_sharpness,
                 Command::group_check, Command::morrey_norm, Command::oracle_compare}) {
    if (text == to_string(c)) return c;
  }
  throw UsageError("unknown command '" + std::string(text) + "'");
}

std::string to_string(Format f) { return f == Format::json ? "json" : "csv"; }

Format parse_format(std::string_view text) {
  if (text == "json") return Format::json;
  if (text == "csv") return Format::csv;
  throw UsageError("unknown format '" + std::string(text) + "'");
}

void RunConfig::check() const {
  try {
    quad.check();
    mc.check();
    grid.check(params.n);
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  if (format == Format::csv && command != Command::verify_sharpness) {
    throw UsageError("csv output is only available for verify-sharpness");
  }
  if (tolerance && !(*tolerance >= 0.0)) throw UsageError("tolerance must be nonnegative");
  const bool strict = command == Command::verify_sharpness;
  const auto v = validate(params, strict);
  if (command == Command::group_check) {
    if (params.n < 1) throw UsageError("n_range: n must be >= 1");
    return;
  }
  if (!v.ok()) throw UsageError(v.summary());
  if (command == Command::morrey_norm) {
    for (int j = 0; j < params.m; ++j) {
      if (!(params.lambda_list[j] > -1.0 / params.q_list[j])) {
        throw UsageError("lambdaj_open: morrey-norm needs lambda_j > -1/q_j so that |x|^sigma_j "
                         "has finite cell integrals");
      }
    }
    if (!(params.lambda > -1.0 / params.q)) {
      throw UsageError("lambda_open: morrey-norm needs lambda > -1/q");
    }
  }
  for (const auto& [lo, hi] : truncations) {
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
      throw UsageError("truncations need 0 < r_min < r_max < inf");
    }
  }
}

nlohmann::json header_record(const RunConfig& c) {
  auto widths = nlohmann::json::array();
  for (const auto& [lo, hi] : c.truncations) widths.push_back({lo, hi});
  return {{"record", "header"},
          {"command", to_string(c.command)},
          {"kind", to_string(c.kind)},
          {"params", c.params},
          {"quad", c.quad},
          {"mc", c.mc},
          {"grid", c.grid},
          {"format", to_string(c.format)},
          {"output_path", c.output_path},
          {"tolerance", c.tolerance ? nlohmann::json(*c.tolerance) : nlohmann::json(nullptr)},
          {"truncations", widths}};
}

std::vector<VerificationReport> group_check(int n, std::int64_t triples, const mc::MCSpec& mc) {
  if (triples < 1) throw InvalidInput("group_check: need at least one triple");
  const auto gp = hgroup::ball_volume_constant(n);
  const auto t0 = std::chrono::steady_clock::now();
  double assoc = 0.0, inverse = 0.0, identity = 0.0, dil_hom = 0.0, norm_hom = 0.0;
  double triangle = 0.0, left_inv = 0.0, symmetry = 0.0, dil_dist = 0.0;
  mc::CounterRng rng(mc.seed, kGroupStream);
  const HPoint e(n);
  for (std::int64_t i = 0; i < triples; ++i) {
    const HPoint x = random_point(n, rng);
    const HPoint y = random_point(n, rng);
    const HPoint z = random_point(n, rng);
    const double r = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
    using namespace hgroup;
    assoc = std::max(assoc, point_gap(group_mul(group_mul(x, y), z), group_mul(x, group_mul(y, z))));
    inverse = std::max(inverse, point_gap(group_mul(x, group_inv(x)), e));
    inverse = std::max(inverse, point_gap(group_mul(group_inv(x), x), e));
    identity = std::max(identity, point_gap(group_mul(x, e), x));
    // Coordinates of the dilate grow like r^2, so this residual is measured
    // relative to the largest coordinate.
    const HPoint dxy_point = dilate(r, group_mul(x, y));
    dil_hom = std::max(dil_hom, point_gap(dxy_point, group_mul(dilate(r, x), dilate(r, y))) /
                                    std::max(1.0, point_gap(dxy_point, e)));
    norm_hom = std::max(norm_hom, std::abs(hnorm(dilate(r, x)) - r * hnorm(x)) / (r * hnorm(x)));
    const double dxz = hdist(x, z), dxy = hdist(x, y), dyz = hdist(y, z);
    triangle = std::max(triangle, std::max(0.0, dxz - dxy - dyz) / dxz);
    left_inv = std::max(left_inv, std::abs(hdist(group_mul(z, x), group_mul(z, y)) - dxy));
    symmetry = std::max(symmetry, std::abs(dxy - hdist(y, x)));
    dil_dist = std::max(dil_dist, std::abs(hdist(dilate(r, x), dilate(r, y)) - r * dxy) / (r * dxy));
  }
  const auto ms = elapsed_ms(t0);
  std::vector<VerificationReport> out;
  struct Property {
    const char* name;
    double gap;
    bool relative;
  };
  const Property props[] = {
      {"associativity", assoc, false},
      {"inverse", inverse, false},
      {"identity", identity, false},
      {"dilation is an automorphism", dil_hom, true},
      {"norm homogeneity", norm_hom, true},
      {"triangle inequality", triangle, true},
      {"left invariance of distance", left_inv, false},
      {"symmetry of distance", symmetry, false},
      {"distance homogeneity", dil_dist, true}};
  for (const auto& [name, gap, relative] : props) {
    const std::string label = name;
    auto r = make_report("group " + label, 0.0, gap, relative ? kScalingTolerance : kGroupTolerance,
                         VerificationReport::Mode::absolute);
    r.convention_note = relative ? "oracle is the worst relative residual over the sampled triples"
                                 : "oracle is the worst absolute residual over the sampled triples";
    r.seed = mc.seed;
    r.runtime_ms = ms;
    r.extra = {{"n", n}, {"triples", triples}};
    out.push_back(std::move(r));
  }
  std::vector<double> axis(static_cast<std::size_t>(2 * n + 1), 0.0);
  axis[0] = 1.0;
  const HPoint e1(n, axis);
  const HPoint origin(n, std::vector<double>(axis.size(), 0.0));
  std::uint64_t k = 0;
  for (double c : {0.0, 1.0, 5.0}) {
    for (double radius : {0.5, 1.0, 2.0}) {
      const auto t1 = std::chrono::steady_clock::now();
      const auto est = mc::mc_ball_integral([](const HPoint&) { return 1.0; }, c > 0.0 ? hgroup::dilate(c, e1) : origin,
                                            radius, gp, mc, mc::sub_stream(kGroupStream, ++k));
      const double exact = gp.Omega_Q * std::pow(radius, gp.Q);
      std::ostringstream label;
      label << "ball volume |a|=" << c << " r=" << radius;
      auto r = make_report(label.str(), exact, est.estimate, 3.0 * est.std_error,
                           VerificationReport::Mode::absolute);
      r.convention_note = "Monte Carlo volume against Omega_Q r^Q; tolerance is three standard errors";
      r.seed = mc.seed;
      r.runtime_ms = elapsed_ms(t1);
      r.extra = {{"n", n}, {"center_norm", c}, {"radius", radius}, {"stderr", est.std_error}};
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<ConvergenceRow> emit_convergence_table(
    OperatorKind kind, const ParamSet& p, const std::vector<std::pair<double, double>>& truncations,
    const BallGrid& grid, const quad::QuadratureSpec& spec, const mc::MCSpec& mc) {
  const auto v = validate(p, true);
  if (!v.ok()) throw UsageError(v.summary());
  std::vector<ConvergenceRow> rows;
  for (const auto& w : truncations) {
    const auto s = sharpness(kind, p, w, grid, spec, mc);
    rows.push_back({w.first, w.second, s.ratio, s.constant, s.ratio_over_constant()});
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "r_min,r_max,ratio,constant,ratio_over_constant\n";
  const auto old = os.precision(17);
  for (const auto& r : rows) {
    os << r.r_min << ',' << r.r_max << ',' << r.ratio << ',' << r.constant << ','
       << r.ratio_over_constant << '\n';
  }
  os.precision(old);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.check();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  std::ofstream file;
  if (!config.output_path.empty()) {
    file.open(config.output_path);
    if (!file) {
      err << "usage error: cannot write " << config.output_path << '\n';
      return 2;
    }
  }
  std::ostream& os = config.output_path.empty() ? out : file;

  try {
    if (config.format == Format::csv) {
      const auto rows = emit_convergence_table(config.kind, config.params, config.truncations,
                                               config.grid, config.quad, config.mc);
      write_csv(os, rows);
      const double tol = tol_or(config, kSharpnessTolerance);
      bool ok = monotone_report(rows).passed || rows.size() < 2;
      for (const auto& r : rows) ok = ok && r.ratio <= r.constant * (1.0 + tol);
      return ok ? 0 : 1;
    }
    os << header_record(config).dump() << '\n';
    bool ok = true;
    for (const auto& r : dispatch(config)) {
      nlohmann::json j = r;
      j["record"] = "report";
      os << j.dump() << '\n';
      ok = ok && r.passed;
    }
    os.flush();
    return ok ? 0 : 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    // Divergent or unconverged computations count as failed verifications.
    if (config.format == Format::json) {
      os << nlohmann::json{{"record", "error"}, {"message", e.what()}}.dump() << '\n';
    }
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sharp constants of multilinear Hardy-Littlewood-Polya and Hilbert operators on "
               "Heisenberg-group Morrey spaces"};
  std::string command = "constant";
  std::string kind = "hlp";
  std::string format = "json";
  std::string out_path;
  std::string truncations = "1e-2:1e2,1e-3:1e3";
  int m = 1;
  int n = 1;
  double q = 2.0;
  std::optional<double> lambda;
  std::vector<double> qj, lambdaj, gammaj;
  double alpha = 0.0;
  std::optional<double> tolerance;
  mc::MCSpec mc;
  quad::QuadratureSpec qs;

  app.add_option("--command", command, "constant | verify-dilation | verify-sharpness | "
                                       "group-check | morrey-norm | oracle-compare");
  app.add_option("--m", m, "number of functions");
  app.add_option("--n", n, "Heisenberg dimension");
  app.add_option("--q", q, "target exponent");
  app.add_option("--qj", qj, "source exponents, comma separated")->delimiter(',');
  app.add_option("--lambda", lambda, "target Morrey exponent (default -1/(2q))");
  app.add_option("--lambdaj", lambdaj, "source Morrey exponents; default q lambda / q_j")
      ->delimiter(',');
  app.add_option("--gammaj", gammaj, "weight exponents gamma_j, comma separated")->delimiter(',');
  app.add_option("--alpha", alpha, "exponent of w_1 = |x|^alpha");
  app.add_option("--kind", kind, "hlp | hilbert");
  app.add_option("--seed", mc.seed, "Monte Carlo seed");
  app.add_option("--samples", mc.samples, "Monte Carlo samples (group-check: triples)");
  app.add_option("--panels", qs.panels, "Gauss-Legendre panels per graded end");
  app.add_option("--rel-target", qs.rel_target, "quadrature relative target");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "json | csv");
  app.add_option("--truncations", truncations, "r_min:r_max pairs for verify-sharpness")
      ->group("");
  app.add_option("--tolerance", tolerance, "override the tolerance of every report")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  RunConfig config;
  try {
    config.command = parse_command(command);
    config.kind = parse_operator_kind(kind);
    config.format = parse_format(format);
    config.truncations = parse_truncations(truncations);
    if (m < 1) throw UsageError("m_range: m must be >= 1");
    if (n < 1) throw UsageError("n_range: n must be >= 1");
    if (qj.empty()) qj.assign(static_cast<std::size_t>(m), m * q);
    const double lam = lambda.value_or(-0.5 / q);
    ParamSet p;
    if (lambdaj.empty()) {
      // The coupling q lambda = q_j lambda_j, with q as given so that an
      // inconsistent --qj shows up in validation instead of being absorbed.
      p = ParamSet::coupled(n, qj, lam, gammaj, alpha);
      p.m = m;
      p.q = q;
      for (std::size_t j = 0; j < p.q_list.size(); ++j) p.lambda_list[j] = q * lam / p.q_list[j];
    } else {
      p.m = m;
      p.n = n;
      p.q = q;
      p.q_list = qj;
      p.lambda = lam;
      p.lambda_list = lambdaj;
      p.gamma_list = gammaj.empty() ? std::vector<double>(static_cast<std::size_t>(m), 0.0) : gammaj;
      p.alpha = alpha;
    }
    config.params = p;
    config.grid = BallGrid::default_grid(n);
  } catch (const InvalidInput& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  config.mc = mc;
  config.quad = qs;
  config.output_path = out_path;
  config.tolerance = tolerance;
  return run(config, out, err);
}

}  // namespace hsharp::cli
