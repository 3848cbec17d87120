#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hsharp/cli.hpp"

using namespace hsharp;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hsharp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<nlohmann::json> records(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) out.push_back(nlohmann::json::parse(line));
  return out;
}

std::string strip_runtime(const std::string& text) {
  std::string out;
  for (auto j : records(text)) {
    j.erase("runtime_ms");
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("constant command") {
  const auto r = run_cli({"--command", "constant", "--m", "1", "--n", "1", "--q", "2", "--lambda",
                          "-0.5", "--kind", "hlp"});
  CHECK(r.code == 0);
  const auto recs = records(r.out);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0]["record"] == "header");
  CHECK(recs[0]["mc"]["samples"] == 4096);
  CHECK(recs[0]["quad"]["panels"] == 40);
  CHECK(recs[0].contains("grid"));
  CHECK(recs[1]["passed"] == true);
  // 2 pi^2 with the true unit-ball volume pi^2 / 2
  CHECK(recs[1]["closed_form"].get<double>() == doctest::Approx(19.7392088021787172).epsilon(1e-14));
}

TEST_CASE("usage errors exit with 2") {
  auto r = run_cli({"--command", "constant", "--q", "2", "--lambda", "0"});
  CHECK(r.code == 2);
  CHECK(r.err.find("lambda_range") != std::string::npos);
  CHECK(run_cli({"--command", "nonsense"}).code == 2);
  CHECK(run_cli({"--kind", "fourier"}).code == 2);
  CHECK(run_cli({"--m", "x"}).code == 2);
  CHECK(run_cli({"--command", "constant", "--format", "csv"}).code == 2);
  CHECK(run_cli({"--command", "verify-sharpness", "--q", "2", "--lambda", "-0.5"}).code == 2);
}

TEST_CASE("forced verification failure exits with 1") {
  const auto r = run_cli({"--command", "oracle-compare", "--m", "2", "--q", "2", "--lambda", "-0.25",
                          "--tolerance", "0"});
  CHECK(r.code == 1);
  const auto recs = records(r.out);
  CHECK(recs.size() >= 4);
}

TEST_CASE("oracle-compare and group-check pass") {
  CHECK(run_cli({"--command", "oracle-compare", "--m", "1", "--q", "3", "--lambda", "-0.3333333333333333"})
            .code == 0);
  const auto g = run_cli({"--command", "group-check", "--n", "2", "--samples", "2000"});
  CHECK(g.code == 0);
  CHECK(records(g.out).size() == 1 + 9 + 9);
}

TEST_CASE("runs are reproducible") {
  const std::vector<std::string> args{"--command", "morrey-norm", "--q", "2", "--lambda", "-0.25",
                                      "--samples", "1000", "--seed", "99"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(strip_runtime(a.out) == strip_runtime(b.out));
}

TEST_CASE("verify-dilation") {
  const auto r = run_cli({"--command", "verify-dilation", "--m", "2", "--q", "2", "--lambda", "-0.25",
                          "--gammaj", "0.1,0.2", "--alpha", "0.3", "--samples", "1000"});
  CHECK(r.code == 0);
  CHECK(records(r.out).size() == 1 + 3 * 3);
}

TEST_CASE("convergence table") {
  const auto p = ParamSet::coupled(1, {2.0}, -0.25);
  const auto rows = cli::emit_convergence_table(OperatorKind::hlp, p, {}, BallGrid::default_grid(1),
                                                {}, {});
  CHECK(rows.empty());
  std::ostringstream os;
  cli::write_csv(os, rows);
  CHECK(os.str() == "r_min,r_max,ratio,constant,ratio_over_constant\n");
  const auto empty = run_cli({"--command", "verify-sharpness", "--q", "2", "--lambda", "-0.25",
                              "--format", "csv", "--truncations", "none"});
  CHECK(empty.code == 0);
  CHECK(empty.out == "r_min,r_max,ratio,constant,ratio_over_constant\n");
  CHECK_THROWS_AS(cli::emit_convergence_table(OperatorKind::hlp, ParamSet::coupled(1, {2.0}, -0.5),
                                              {}, BallGrid::default_grid(1), {}, {}),
                  cli::UsageError);
}
