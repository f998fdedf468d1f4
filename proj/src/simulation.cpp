#include "ksnbc/simulation.hpp"

#include <chrono>
#include <cmath>

namespace ksnbc::stepper {

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "Completed";
    case RunStatus::BlowUp: return "BlowUp";
    case RunStatus::NegativityFailure: return "NegativityFailure";
    case RunStatus::SolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

RunResult run(const Problem& problem, GridPtr grid, Field u0, Field v0, double horizon,
              const monitors::MonitorConfig& monitor_config, const StepperOptions& options, const RunHooks& hooks) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw Error("run horizon must be finite and >= 0");
  if (monitor_config.cadence < 1) throw Error("monitor cadence must be >= 1");
  if (u0.size() != grid->size()) throw Error("initial density does not match the grid");
  u0.require_finite("initial density");
  if (u0.min() < 0.0) throw Error("initial density must be nonnegative");
  const bool nbc_mode = std::holds_alternative<NbcParams>(problem);
  if (nbc_mode || v0.size() != grid->size()) v0 = Field(grid);
  v0.require_finite("initial signal");
  if (v0.min() < 0.0) throw Error("initial signal must be nonnegative");

  const auto wall_start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count(); };

  RunResult result;
  result.series = monitors::MonitorSeries(monitor_config.extra_r);
  Stepper stepper(grid, options);

  SimState state;
  state.u = std::move(u0);
  state.v = std::move(v0);

  auto finish = [&](RunStatus status, double value, std::string message, double event_t = -1.0) {
    result.outcome.status = status;
    result.outcome.t = event_t >= 0.0 ? event_t : state.t;
    result.outcome.value = value;
    result.outcome.steps = state.step_count;
    result.outcome.message = std::move(message);
    result.outcome.wall_time = elapsed();
    if (result.series.empty() || result.series.back().t < state.t) {
      try {
        result.series.push(monitors::sample(state, problem, monitor_config.extra_r));
      } catch (const NonFiniteError&) {
      }
    }
    result.snapshots.push_back({"final", state.t, state.u, state.v});
    result.final_state = state;
    return result;
  };

  const auto* ks = std::get_if<ModelParams>(&problem);
  if (ks && ks->tau == 0) {
    try {
      stepper.equilibrate_signal(state, *ks);
    } catch (const StepFailure& e) {
      return finish(RunStatus::SolverFailure, e.value(), e.what());
    }
  }

  result.series.push(monitors::sample(state, problem, monitor_config.extra_r));
  result.snapshots.push_back({"t0", 0.0, state.u, state.v});
  if (horizon == 0.0) return finish(RunStatus::Completed, state.u.max(), "");

  bool mid_taken = false;
  int pinned = 0;
  double prev_max = state.u.max();

  while (state.t < horizon) {
    if (state.step_count >= options.max_steps) {
      return finish(RunStatus::SolverFailure, prev_max, "step budget exhausted");
    }
    double dt = options.fixed_dt ? *options.fixed_dt : adapt_dt(state, problem, options);
    const double remaining = horizon - state.t;
    const bool last = dt >= remaining * (1.0 - 1e-12);
    if (last) dt = remaining;

    SimState next;
    try {
      next = stepper.step(state, problem, dt);
    } catch (const StepFailure& e) {
      const auto status =
          e.kind() == StepFailure::Kind::Negativity ? RunStatus::NegativityFailure : RunStatus::SolverFailure;
      return finish(status, e.value(), e.what(), state.t + dt);
    } catch (const NonFiniteError& e) {
      return finish(RunStatus::SolverFailure, std::nan(""), e.what(), state.t + dt);
    }
    if (last) next.t = horizon;
    if (hooks.on_step) hooks.on_step(state, next);
    state = std::move(next);

    const double max_u = state.u.max();
    if (max_u > options.blowup_cap) {
      return finish(RunStatus::BlowUp, max_u, "max u exceeded the blow-up cap");
    }
    if (dt <= options.dt_min * (1.0 + 1e-12) && max_u > prev_max) {
      if (++pinned >= options.pinned_steps) return finish(RunStatus::BlowUp, max_u, "time step pinned at dt_min");
    } else {
      pinned = 0;
    }
    prev_max = max_u;

    if (state.step_count % monitor_config.cadence == 0 && state.t < horizon) {
      result.series.push(monitors::sample(state, problem, monitor_config.extra_r));
    }
    if (!mid_taken && state.t >= 0.5 * horizon) {
      mid_taken = true;
      result.snapshots.push_back({"mid", state.t, state.u, state.v});
    }
  }
  return finish(RunStatus::Completed, state.u.max(), "");
}

}  // namespace ksnbc::stepper
