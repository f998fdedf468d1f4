#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ksnbc/harness.hpp"
#include "ksnbc/manifest.hpp"

using namespace ksnbc;
using namespace ksnbc::harness;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("ksnbc_test_harness_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  [[nodiscard]] std::string file(const std::string& name) const { return (path / name).string(); }
  fs::path path;
};

std::string write(const TempDir& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir.file(name)) << text;
  return dir.file(name);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ksnbc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli(static_cast<int>(argv.size()), argv.data());
}

const char* kSmallRun = R"(
[model]
chi = 1.0
a = 1.0
mu = 1.0
alpha = 1.0
beta = 1.0
tau = 1
p = 1.3
dim = 2

[grid]
cells = 16

[initial.u]
kind = "gaussian-bump"
center = [0.5, 0.5]
width = 0.1
amplitude = 5.0

[time]
T = 0.3
)";

const char* kBlowUp = R"(
[nbc]
mu = 1.0
Q = 2.0
P = 1.9

[grid]
cells = 32

[initial.u]
kind = "constant"
value = 20.0

[time]
T = 10.0
)";

}  // namespace

TEST_CASE("minimal config gets documented defaults") {
  const auto cfg = parse_config("[model]\nchi=1\na=1\nmu=1\nalpha=1\nbeta=1\ntau=1\np=1.3\ndim=2\n[time]\nT=1\n", "min");
  const auto& run = std::get<RunConfig>(cfg);
  CHECK(run.mode == RunConfig::Mode::KellerSegel);
  CHECK(run.stepper.dt_max == 1e-2);
  CHECK(run.stepper.dt_min == 1e-12);
  CHECK(run.stepper.blowup_cap == 1e6);
  CHECK(run.stepper.boundary_flux);
  CHECK(run.monitor.cadence == 10);
  CHECK(run.grid.nx == 64);
  CHECK(run.u0.kind == InitialSpec::Kind::Constant);
  CHECK(run.u0.value == 1.0);
  CHECK(run.v0.value == 0.0);
  CHECK(run.horizon == 1.0);
  const auto echo = to_json(run);
  CHECK(echo.contains("model"));
}

TEST_CASE("unknown keys are parse errors naming key and line") {
  const std::string text = "[model]\nchi=1\na=1\nmu=1\nalpha=1\nbeta=1\ntau=1\np=1.3\ndim=2\n[time]\nT=1\ncadense=5\n";
  try {
    (void)parse_config(text, "typo.toml");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.key() == "time.cadense");
    CHECK(e.line() == 12);
    CHECK(std::string(e.what()).find("cadense") != std::string::npos);
  }
  CHECK_NOTHROW((void)parse_config(text, "typo.toml", LoadOptions{false}));
  CHECK_THROWS_AS((void)parse_config("[model\nchi=", "broken"), ParseError);
  CHECK_THROWS_AS((void)parse_config("[model]\nchi=\"one\"\n", "type"), ParseError);
}

TEST_CASE("parameter violations surface as validation errors") {
  try {
    (void)parse_config("[model]\nchi=1\na=1\nmu=1\nalpha=1\nbeta=1\ntau=1\np=1.0\ndim=2\n[time]\nT=1\n", "p1");
    FAIL("expected ValidationError");
  } catch (const model::ValidationError& e) {
    CHECK(e.has(model::ViolationKind::BadExponent));
    CHECK(std::string(e.what()).find("p") != std::string::npos);
  }
  CHECK_THROWS((void)parse_config("[model]\nchi=1\na=1\nmu=1\nalpha=1\nbeta=1\ntau=1\np=1.3\ndim=2\n", "no horizon"));
  CHECK_THROWS((void)parse_config(std::string(kSmallRun) + "[nbc]\nmu=1\nQ=2\nP=1.2\n", "both"));
}

TEST_CASE("missing config file names the path") {
  const std::string path = "/nonexistent/dir/missing.toml";
  try {
    (void)load_config(path);
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(path) != std::string::npos);
  }
  CHECK(run_cli({"run", path}) == kExitError);
}

TEST_CASE("exit code contract") {
  CHECK(exit_code(stepper::RunStatus::Completed) == 0);
  CHECK(exit_code(stepper::RunStatus::BlowUp) == 2);
  CHECK(exit_code(stepper::RunStatus::NegativityFailure) == 1);
  CHECK(exit_code(stepper::RunStatus::SolverFailure) == 1);
  CHECK(run_cli({}) == kExitUsage);
  CHECK(run_cli({"frobnicate"}) == kExitUsage);
  CHECK(run_cli({"run"}) == kExitUsage);
  CHECK(run_cli({"--workers", "0", "sweep", "x.toml"}) == kExitUsage);
  CHECK(run_cli({"--help"}) == kExitOk);
}

TEST_CASE("output directory precedence") {
  CliOverrides ov;
  ::unsetenv("KSNBC_OUT");
  CHECK(resolve_output_dir(ov, "", "run") == (fs::path("ksnbc-out") / "run").string());
  CHECK(resolve_output_dir(ov, "cfgdir", "run") == "cfgdir");
  ::setenv("KSNBC_OUT", "envdir", 1);
  CHECK(resolve_output_dir(ov, "cfgdir", "run") == "envdir");
  ov.out = "flagdir";
  CHECK(resolve_output_dir(ov, "cfgdir", "run") == "flagdir");
  ::unsetenv("KSNBC_OUT");
}

TEST_CASE("single run writes a verifiable manifest and reproducible series") {
  TempDir dir;
  const auto cfg = std::get<RunConfig>(parse_config(kSmallRun, "small"));
  const auto a = execute_run(cfg, dir.file("a"));
  const auto b = execute_run(cfg, dir.file("b"));
  CHECK(a.result.outcome.status == stepper::RunStatus::Completed);
  CHECK(fs::exists(dir.file("a/series.csv")));
  CHECK(fs::exists(dir.file("a/snapshots/u_t0.csv")));
  CHECK(fs::exists(dir.file("a/snapshots/v_final.csv")));
  CHECK(slurp(dir.file("a/series.csv")) == slurp(dir.file("b/series.csv")));
  CHECK(a.compatibility_residual > 0.0);

  const auto manifest = read_manifest(dir.file("a"));
  CHECK(manifest.at("outcome").at("status") == "Completed");
  CHECK(manifest.contains("config"));
  CHECK(manifest.contains("started"));
  CHECK(manifest.contains("finished"));
  CHECK(manifest.contains("version"));
  const auto check = verify_manifest(dir.file("a"));
  CHECK(check.ok());
  CHECK(check.checked >= 3);

  std::ostringstream out;
  CHECK(report(dir.file("a"), out) == kExitOk);
  CHECK(out.str().find("sup_u") != std::string::npos);

  std::ofstream(dir.file("a/series.csv"), std::ios::app) << "tampered\n";
  CHECK_FALSE(verify_manifest(dir.file("a")).ok());
  std::ostringstream out2;
  CHECK(report(dir.file("a"), out2) == kExitError);
}

TEST_CASE("command line run and blow-up exit codes") {
  TempDir dir;
  const auto ok = write(dir, "run.toml", kSmallRun);
  CHECK(run_cli({"--out", dir.file("run_out"), "run", ok}) == kExitOk);
  CHECK(fs::exists(dir.file("run_out/manifest.json")));
  CHECK(run_cli({"report", dir.file("run_out")}) == kExitOk);
  CHECK(run_cli({"--out", dir.file("nbc_out"), "nbc", ok}) == kExitError);

  const auto bad = write(dir, "blowup.toml", kBlowUp);
  CHECK(run_cli({"--out", dir.file("blow"), "nbc", bad}) == kExitBlowUp);
  CHECK(read_manifest(dir.file("blow")).at("outcome").at("status") == "BlowUp");
  CHECK(run_cli({"--out", dir.file("x"), "run", bad}) == kExitError);

  const auto typo = write(dir, "typo.toml", std::string(kSmallRun) + "colour = 3\n");
  CHECK(run_cli({"--out", dir.file("typo"), "run", typo}) == kExitError);
  CHECK(run_cli({"--no-strict", "--out", dir.file("typo"), "run", typo}) == kExitOk);
}

TEST_CASE("sweep rows cover every cell, including failed ones") {
  TempDir dir;
  auto text = std::string(kSmallRun) + "[sweep]\np = [1.0, 1.2, 1.3]\nmu = [1.0, 2.0]\nT = 0.2\nworkers = 2\n";
  auto cfg = std::get<SweepConfig>(parse_config(text, "sweep"));
  CHECK(cfg.cell_count() == 6);
  const auto rows = execute_sweep(cfg, dir.file("s"));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].p == 1.0);
  CHECK(rows[0].mu == 1.0);
  CHECK(rows[1].mu == 2.0);
  CHECK(rows[0].status == "Invalid");
  CHECK(rows[1].status == "Invalid");
  for (std::size_t k = 2; k < rows.size(); ++k) CHECK(rows[k].status == "Completed");

  std::ifstream csv(dir.file("s/sweep.csv"));
  std::string header, line;
  std::getline(csv, header);
  CHECK(header.rfind("p,mu,chi,status,", 0) == 0);
  int n = 0;
  while (std::getline(csv, line)) ++n;
  CHECK(n == 6);
  CHECK(verify_manifest(dir.file("s")).ok());
  std::ostringstream out;
  CHECK(report(dir.file("s"), out) == kExitOk);

  text = std::string(kSmallRun) + "[sweep]\np = [1.1]\nmu = [1.0]\nmax_cells = 0\n";
  CHECK_THROWS((void)parse_config(text, "cap"));
  CHECK_THROWS((void)parse_config(std::string(kSmallRun) + "[sweep]\np = []\nmu = [1.0]\n", "empty"));
}

TEST_CASE("a one-cell sweep matches the single run") {
  TempDir dir;
  const auto run_cfg = std::get<RunConfig>(parse_config(kSmallRun, "small"));
  const auto single = execute_run(run_cfg, dir.file("single"));
  const auto sweep_cfg =
      std::get<SweepConfig>(parse_config(std::string(kSmallRun) + "[sweep]\np = [1.3]\nmu = [1.0]\n", "one"));
  const auto rows = execute_sweep(sweep_cfg, dir.file("sweep"));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "Completed");
  CHECK(rows[0].steps == single.result.outcome.steps);
  for (const auto& v : single.verdicts) {
    if (rows[0].verdict.count(v.functional)) CHECK(rows[0].verdict.at(v.functional) == v.status());
  }
  CHECK(slurp(dir.file("single/series.csv")) == slurp(dir.file("sweep/cell_000/series.csv")));
}

TEST_CASE("inequality campaign writes one table per lemma") {
  TempDir dir;
  const auto path = write(dir, "ineq.toml",
                          "[ineq]\nseed = 3\ncount = 12\nresolutions = [32, 64]\n"
                          "lemmas = [\"gny\", \"boundary_reg\", \"convexity\"]\n");
  CHECK(run_cli({"--out", dir.file("lab"), "ineq", path}) == kExitOk);
  CHECK(fs::exists(dir.file("lab/gny.csv")));
  CHECK(fs::exists(dir.file("lab/boundary_reg.csv")));
  CHECK(fs::exists(dir.file("lab/convexity.csv")));
  CHECK_FALSE(fs::exists(dir.file("lab/unif_gn.csv")));
  CHECK(verify_manifest(dir.file("lab")).ok());
  CHECK(read_manifest(dir.file("lab")).at("config").at("ineq").at("seed") == 3);
}
