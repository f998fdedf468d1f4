#pragma once

#include <optional>
#include <variant>

#include "ksnbc/grid.hpp"
#include "ksnbc/model.hpp"
#include "ksnbc/operators.hpp"

namespace ksnbc::stepper {

using grid::Field;
using grid::GridPtr;
using model::ModelParams;
using model::NbcParams;
using operators::LinearSolveReport;

/// Either the chemotaxis system or the scalar boundary-flux problem.
using Problem = std::variant<ModelParams, NbcParams>;

/// Mass bookkeeping of one accepted step.
///
/// The scheme moves mass only through the reaction and boundary terms, both
/// taken at the start of the step, so
///   mass_after − mass_before = dt · (reaction + boundary_influx)
/// up to linear-solver residual. The spatial flux terms (diffusion, chemotaxis)
/// telescope; `telescoping` is the absolute discrete integral they leave behind.
struct StepBalance {
  double dt = 0.0;
  double mass_before = 0.0;
  double mass_after = 0.0;
  double reaction = 0.0;         ///< ∫ source terms at step start
  double boundary_influx = 0.0;  ///< ∫_∂Ω trace^p dS at step start (0 when flux is off)
  double telescoping = 0.0;      ///< |∫Δ_h u_new| + |∫χ∇·(u∇v)|

  [[nodiscard]] double residual() const;
};

struct SimState {
  Field u;
  Field v;
  double t = 0.0;
  double dt = 0.0;  ///< last step size (0 before the first step)
  long step_count = 0;
  LinearSolveReport u_report;
  LinearSolveReport v_report;
  StepBalance balance;
};

struct StepperOptions {
  bool boundary_flux = true;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  double safety = 0.8;
  std::optional<double> fixed_dt;
  double negativity_tol = 1e-8;  ///< relative to max u
  double blowup_cap = 1e6;
  int pinned_steps = 100;
  long max_steps = 50'000'000;
  operators::SolverOptions solver;
};

class StepFailure : public Error {
 public:
  enum class Kind { Negativity, Solver };
  StepFailure(Kind kind, double t, double value, const std::string& what);
  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double time() const { return t_; }
  [[nodiscard]] double value() const { return value_; }

 private:
  Kind kind_;
  double t_;
  double value_;
};

/// Advances states of one grid. Owns the Helmholtz solvers (and their scratch
/// space) so repeated steps reuse transform plans.
class Stepper {
 public:
  Stepper(GridPtr grid, StepperOptions options);

  /// τ = 0: v is kept slaved to u; the incoming state must already satisfy
  /// (β − Δ_h)v = αu (see equilibrate_signal).
  [[nodiscard]] SimState step_parabolic_elliptic(const SimState& state, const ModelParams& params, double dt);
  /// τ = 1: implicit signal update, then the density update with the new signal.
  [[nodiscard]] SimState step_parabolic_parabolic(const SimState& state, const ModelParams& params, double dt);
  /// U_t = ΔU − μU^Q with ∂U/∂ν = U^P.
  [[nodiscard]] SimState step_nbc(const SimState& state, const NbcParams& nbc, double dt);
  [[nodiscard]] SimState step(const SimState& state, const Problem& problem, double dt);

  /// Solves (β − Δ_h)v = αu for the current u (parabolic–elliptic coupling).
  void equilibrate_signal(SimState& state, const ModelParams& params);

  [[nodiscard]] const StepperOptions& options() const { return options_; }
  [[nodiscard]] operators::FluxSpec density_flux(double exponent) const;

 private:
  SimState update_density(const SimState& state, Field v_new, const Field& explicit_rate,
                          const Field& chemo, double dt, double reaction_integral, double influx);

  GridPtr grid_;
  StepperOptions options_;
  operators::HelmholtzSolver u_solver_;
  operators::HelmholtzSolver v_solver_;
};

/// Explicit-term step bound, clamped to [dt_min, dt_max]:
///   safety · min{10·h²/(2·dim), 1 / (chemotactic outflow + a + μ·max u + p·max u^{p−1}/h)}.
/// Each limiter is active only when the quantity it guards is nonzero.
[[nodiscard]] double adapt_dt(const SimState& state, const ModelParams& params, const StepperOptions& options);
[[nodiscard]] double adapt_dt(const SimState& state, const NbcParams& nbc, const StepperOptions& options);
[[nodiscard]] double adapt_dt(const SimState& state, const Problem& problem, const StepperOptions& options);

}  // namespace ksnbc::stepper
