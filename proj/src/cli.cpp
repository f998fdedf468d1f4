#include <CLI11.hpp>

#include <iostream>

#include "ksnbc/harness.hpp"

namespace ksnbc::harness {

namespace {

template <class T>
const T& expect(const Config& config, const std::string& path, const char* what) {
  if (const auto* c = std::get_if<T>(&config)) return *c;
  throw Error(path + " is not " + what);
}

void print_run(const RunReport& rep, std::ostream& out) {
  const auto& o = rep.result.outcome;
  out << stepper::to_string(o.status) << " at t = " << o.t << " (" << o.steps << " steps, " << o.wall_time << " s)";
  if (!o.message.empty()) out << ": " << o.message;
  out << '\n';
  for (const auto& v : rep.verdicts) out << "  " << v.functional << ": " << v.status() << '\n';
  out << "output: " << rep.dir << '\n';
}

int do_run(const std::string& path, const CliOverrides& ov, RunConfig::Mode mode) {
  const Config config = load_config(path, {ov.strict});
  const bool ks = mode == RunConfig::Mode::KellerSegel;
  RunConfig c = expect<RunConfig>(config, path, "a single-run configuration");
  if (c.mode != mode)
    throw Error(path + (ks ? " describes the scalar problem; use `ksnbc nbc`" : " has no [nbc] table; use `ksnbc run`"));
  if (ov.seed) c.seed = *ov.seed;
  const auto rep = execute_run(c, resolve_output_dir(ov, c.output_dir, ks ? "run" : "nbc"));
  print_run(rep, std::cout);
  return exit_code(rep.result.outcome.status);
}

int do_sweep(const std::string& path, const CliOverrides& ov) {
  SweepConfig c = expect<SweepConfig>(load_config(path, {ov.strict}), path, "a sweep configuration ([sweep])");
  if (ov.workers) c.workers = *ov.workers;
  if (ov.seed) c.base.seed = *ov.seed;
  const std::string dir = resolve_output_dir(ov, c.base.output_dir, "sweep");
  const auto rows = execute_sweep(c, dir);
  for (const auto& r : rows)
    std::cout << "p = " << r.p << "  mu = " << r.mu << "  chi = " << r.chi << "  " << r.status << '\n';
  std::cout << "output: " << dir << '\n';
  return kExitOk;
}

int do_ineq(const std::string& path, const CliOverrides& ov) {
  IneqConfig c = expect<IneqConfig>(load_config(path, {ov.strict}), path, "an inequality-lab configuration ([ineq])");
  if (ov.seed) c.ensemble.seed = *ov.seed;
  const std::string dir = resolve_output_dir(ov, c.output_dir, "ineq");
  const auto s = execute_ineq(c, dir);
  for (const auto& r : s.reports)
    std::cout << r.lemma << " [" << r.parameter_string() << "] C = " << r.constant()
              << (r.flagged ? "  FLAGGED: grows with resolution" : "") << '\n';
  std::cout << "violations: " << s.violations << "  flagged: " << s.flagged << '\n';
  std::cout << "output: " << dir << '\n';
  return s.violations == 0 ? kExitOk : kExitError;
}

}  // namespace

int cli(int argc, const char* const* argv) {
  CLI::App app{"Finite-volume chemotaxis simulator with nonlinear boundary flux, and its verification harness",
               "ksnbc"};
  app.require_subcommand(1);
  app.fallthrough();

  CliOverrides ov;
  std::string out, config_path, dir;
  int workers = 0;
  std::uint64_t seed = 0;
  app.add_option("--out", out, "output directory (overrides KSNBC_OUT and [output].dir)");
  app.add_option("--workers", workers, "sweep worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed recorded in the manifest; ensemble seed for ineq");
  app.add_flag("--strict,!--no-strict", ov.strict, "reject unknown config keys (default on)");

  auto* run = app.add_subcommand("run", "integrate the chemotaxis system");
  run->add_option("config", config_path, "TOML configuration")->required();
  auto* nbc = app.add_subcommand("nbc", "integrate the scalar nonlinear-boundary problem");
  nbc->add_option("config", config_path, "TOML configuration")->required();
  auto* sweep = app.add_subcommand("sweep", "run a (p, mu) parameter sweep");
  sweep->add_option("config", config_path, "TOML configuration")->required();
  auto* ineq_cmd = app.add_subcommand("ineq", "run inequality-lab checks");
  ineq_cmd->add_option("config", config_path, "TOML configuration")->required();
  auto* rep = app.add_subcommand("report", "summarise an output directory and verify checksums");
  rep->add_option("dir", dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << '\n' << config_schema();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All) << '\n' << config_schema();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help() << '\n' << config_schema();
    return kExitUsage;
  }

  if (!out.empty()) ov.out = out;
  if (workers > 0) ov.workers = workers;
  if (app.count("--seed")) ov.seed = seed;

  try {
    if (*run) return do_run(config_path, ov, RunConfig::Mode::KellerSegel);
    if (*nbc) return do_run(config_path, ov, RunConfig::Mode::Nbc);
    if (*sweep) return do_sweep(config_path, ov);
    if (*ineq_cmd) return do_ineq(config_path, ov);
    if (*rep) return report(dir, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (...) {
    std::cerr << "error: unknown failure\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace ksnbc::harness
