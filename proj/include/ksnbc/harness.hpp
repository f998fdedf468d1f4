#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ksnbc/config.hpp"

namespace ksnbc::harness {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitBlowUp = 2, kExitUsage = 64 };

/// Outcome status → process exit code (Completed 0, BlowUp 2, failures 1).
[[nodiscard]] int exit_code(stepper::RunStatus status);

/// Verdict of one functional, or the reason none could be formed.
struct FunctionalVerdict {
  std::string functional;
  std::optional<monitors::Verdict> verdict;
  std::string note;  ///< e.g. "insufficient samples"

  [[nodiscard]] std::string status() const;
};

[[nodiscard]] std::vector<FunctionalVerdict> verdicts(const monitors::MonitorSeries& series,
                                                      const std::vector<std::string>& functionals, bool blown_up,
                                                      const monitors::VerdictOptions& options = {});

/// Functionals judged for a run: sup_u, l2, llogl, gradv2, phi, psi for the
/// chemotaxis system; sup_u, l2 for the scalar problem.
[[nodiscard]] std::vector<std::string> judged_functionals(const RunConfig& config);

/// max over boundary faces of |∂u₀/∂ν − trace(u₀)^p| (p = 0 means homogeneous
/// data). Nonzero for initial data that violate the compatibility condition.
[[nodiscard]] double compatibility_residual(const grid::Field& u0, double exponent);

struct RunReport {
  stepper::RunResult result;
  std::vector<FunctionalVerdict> verdicts;
  double compatibility_residual = 0.0;
  std::string dir;
};

/// Runs one configuration and writes series.csv, snapshots/*.csv and
/// manifest.json into `out_dir`.
[[nodiscard]] RunReport execute_run(const RunConfig& config, const std::string& out_dir);

struct SweepRow {
  double p = 0.0;
  double mu = 0.0;
  double chi = 0.0;
  std::string status;  ///< run status, or "Invalid"/"Error" when the cell never ran
  double t_end = 0.0;
  long steps = 0;
  std::map<std::string, std::string> verdict;  ///< sup_u, llogl, phi
  std::map<std::string, double> sup;
  double wall_time = 0.0;
  std::string classification;
  std::string citation;
  std::string message;
};

[[nodiscard]] const std::vector<std::string>& sweep_columns();

/// Runs every (p, μ[, χ]) cell in a pool of `config.workers` threads, each
/// cell in its own subdirectory, then writes sweep.csv and manifest.json.
/// Cell failures are recorded in their row.
[[nodiscard]] std::vector<SweepRow> execute_sweep(const SweepConfig& config, const std::string& out_dir);

struct IneqSummary {
  std::vector<ineq::ConstantFitReport> reports;
  std::size_t violations = 0;
  std::size_t flagged = 0;
  double convexity_max = 0.0;
};

/// Runs the configured lemma checks; writes one CSV per lemma plus manifest.json.
[[nodiscard]] IneqSummary execute_ineq(const IneqConfig& config, const std::string& out_dir);

/// Prints a summary of an output directory and verifies its checksums.
/// Returns kExitOk when every checksum matches.
[[nodiscard]] int report(const std::string& dir, std::ostream& out);

struct CliOverrides {
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  bool strict = true;
};

/// Output directory precedence: --out, then $KSNBC_OUT, then [output].dir,
/// then ./ksnbc-out/<command>.
[[nodiscard]] std::string resolve_output_dir(const CliOverrides& overrides, const std::string& configured,
                                             const std::string& command);

/// Full command-line entry point; every path returns 0, 1, 2 or 64.
[[nodiscard]] int cli(int argc, const char* const* argv);

}  // namespace ksnbc::harness
