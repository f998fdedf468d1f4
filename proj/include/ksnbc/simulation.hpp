#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ksnbc/monitors.hpp"
#include "ksnbc/stepper.hpp"

namespace ksnbc::stepper {

enum class RunStatus { Completed, BlowUp, NegativityFailure, SolverFailure };
[[nodiscard]] const char* to_string(RunStatus status);

struct RunOutcome {
  RunStatus status = RunStatus::Completed;
  double t = 0.0;      ///< time of the terminal event (T when Completed)
  double value = 0.0;  ///< max u for BlowUp, min u for NegativityFailure
  long steps = 0;
  double wall_time = 0.0;  ///< seconds
  std::string message;
};

struct Snapshot {
  std::string label;  ///< "t0", "mid", "final"
  double t;
  Field u;
  Field v;
};

struct RunResult {
  RunOutcome outcome;
  monitors::MonitorSeries series;
  SimState final_state;
  std::vector<Snapshot> snapshots;
};

struct RunHooks {
  /// Called after every accepted step.
  std::function<void(const SimState& before, const SimState& after)> on_step;
};

/// Integrates to t = T or the first terminal event. Numerical failures end up
/// in the outcome; only invalid inputs throw.
///
/// For τ = 0 the supplied v₀ is ignored and replaced by the elliptic solve.
/// For the scalar problem v is carried as a zero field.
[[nodiscard]] RunResult run(const Problem& problem, GridPtr grid, Field u0, Field v0, double horizon,
                            const monitors::MonitorConfig& monitor_config, const StepperOptions& options,
                            const RunHooks& hooks = {});

}  // namespace ksnbc::stepper
