#include "ksnbc/stepper.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ksnbc/kernels.hpp"

namespace ksnbc::stepper {

namespace {

using operators::FluxSpec;

// Largest rate at which upwinded chemotactic flux drains a cell:
// max_k Σ_{nb : χv_nb > χv_k} (χv_nb − χv_k) / h².
double chemotactic_outflow_rate(const Field& v, double chi) {
  if (chi == 0.0) return 0.0;
  const auto& g = v.grid();
  const double cx = 1.0 / (g.hx() * g.hx());
  const double cy = g.dim() == 2 ? 1.0 / (g.hy() * g.hy()) : 0.0;
  double worst = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      const double c = chi * v.at(i, j);
      double out = 0.0;
      auto face = [&](double nb, double coef) { out += coef * std::max(0.0, chi * nb - c); };
      if (i > 0) face(v.at(i - 1, j), cx);
      if (i + 1 < g.nx()) face(v.at(i + 1, j), cx);
      if (g.dim() == 2) {
        if (j > 0) face(v.at(i, j - 1), cy);
        if (j + 1 < g.ny()) face(v.at(i, j + 1), cy);
      }
      worst = std::max(worst, out);
    }
  return worst;
}

double clamp_dt(double dt, const StepperOptions& o) { return std::min(o.dt_max, std::max(o.dt_min, dt)); }

double diffusion_guard(const Field& u) {
  const double hi = u.max();
  const double lo = u.min();
  if (!(hi - lo > 1e-14 * std::max(1.0, std::abs(hi)))) return std::numeric_limits<double>::infinity();
  const auto& g = u.grid();
  const double h = g.min_spacing();
  return 10.0 * h * h / (2.0 * g.dim());
}

double finish_dt(double rate, double guard, const StepperOptions& o) {
  const double explicit_limit = rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
  const double bound = std::min(guard, explicit_limit);
  if (std::isinf(bound)) return o.dt_max;
  return clamp_dt(o.safety * bound, o);
}

void check_positivity(const Field& u, double t, double tol) {
  if (!u.all_finite()) throw StepFailure(StepFailure::Kind::Solver, t, std::numeric_limits<double>::quiet_NaN(),
                                         "density became non-finite");
  const double lo = u.min();
  const double hi = u.max();
  if (lo < -tol * std::max(hi, 0.0))
    throw StepFailure(StepFailure::Kind::Negativity, t, lo, "density undershoot " + std::to_string(lo));
}

}  // namespace

double StepBalance::residual() const { return std::abs(mass_after - mass_before - dt * (reaction + boundary_influx)); }

StepFailure::StepFailure(Kind kind, double t, double value, const std::string& what)
    : Error(what + " at t = " + std::to_string(t)), kind_(kind), t_(t), value_(value) {}

Stepper::Stepper(GridPtr grid, StepperOptions options)
    : grid_(grid), options_(options), u_solver_(grid, options.solver), v_solver_(grid, options.solver) {}

FluxSpec Stepper::density_flux(double exponent) const {
  return options_.boundary_flux ? FluxSpec::power_law(exponent) : FluxSpec::homogeneous();
}

void Stepper::equilibrate_signal(SimState& state, const ModelParams& params) {
  Field rhs = params.alpha * state.u;
  if (state.v.size() != state.u.size()) state.v = Field(grid_);
  try {
    state.v_report = v_solver_.solve(rhs, params.beta, state.v);
  } catch (const operators::NoConvergenceError& e) {
    throw StepFailure(StepFailure::Kind::Solver, state.t, e.report().residual, "signal solve failed");
  }
}

SimState Stepper::update_density(const SimState& state, Field v_new, const Field& explicit_rate, const Field& chemo,
                                 double dt, double reaction_integral, double influx) {
  SimState next;
  next.v = std::move(v_new);
  next.t = state.t + dt;
  next.dt = dt;
  next.step_count = state.step_count + 1;
  next.v_report = state.v_report;

  // (I − dt·Δ_h) u_new = u + dt·E  ⇔  (1/dt − Δ_h) u_new = (u + dt·E)/dt
  Field rhs = state.u;
  kernels::omp::axpy(dt, explicit_rate.values(), rhs.values());
  rhs *= 1.0 / dt;
  next.u = state.u;
  try {
    next.u_report = u_solver_.solve(rhs, 1.0 / dt, next.u);
  } catch (const operators::NoConvergenceError& e) {
    throw StepFailure(StepFailure::Kind::Solver, next.t, e.report().residual, "density solve failed");
  }
  check_positivity(next.u, next.t, options_.negativity_tol);

  auto& b = next.balance;
  b.dt = dt;
  b.mass_before = grid::integrate(state.u);
  b.mass_after = grid::integrate(next.u);
  b.reaction = reaction_integral;
  b.boundary_influx = influx;
  b.telescoping = std::abs(grid::integrate(operators::laplacian(next.u, FluxSpec::homogeneous()))) +
                  std::abs(grid::integrate(chemo));
  return next;
}

namespace {

struct ExplicitTerms {
  Field rate;
  Field chemo;
  double reaction_integral;
  double influx;
};

ExplicitTerms chemotaxis_terms(const Field& u, const Field& v, const ModelParams& params, const FluxSpec& flux) {
  Field chi_v = params.chi * v;
  Field chemo = operators::chemo_divergence(u, chi_v);  // χ∇·(u∇v), upwinded along χ∇v
  Field reaction(u.grid_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) reaction[k] = params.a * u[k] - params.mu * u[k] * u[k];
  const double reaction_integral = grid::integrate(reaction);
  Field rate = reaction;
  rate -= chemo;
  double influx = 0.0;
  if (flux.is_power_law()) {
    rate += operators::boundary_source(u, flux);
    influx = grid::boundary_integral_pow(u, flux.exponent);
  }
  return {std::move(rate), std::move(chemo), reaction_integral, influx};
}

}  // namespace

SimState Stepper::step_parabolic_elliptic(const SimState& state, const ModelParams& params, double dt) {
  if (params.tau != 0) throw Error("step_parabolic_elliptic requires tau = 0");
  auto terms = chemotaxis_terms(state.u, state.v, params, density_flux(params.p));
  SimState next = update_density(state, state.v, terms.rate, terms.chemo, dt, terms.reaction_integral, terms.influx);
  equilibrate_signal(next, params);
  return next;
}

SimState Stepper::step_parabolic_parabolic(const SimState& state, const ModelParams& params, double dt) {
  if (params.tau != 1) throw Error("step_parabolic_parabolic requires tau = 1");
  // (I + dt·β − dt·Δ_h) v_new = v + dt·α·u
  Field v_rhs = state.v;
  kernels::omp::axpy(dt * params.alpha, state.u.values(), v_rhs.values());
  v_rhs *= 1.0 / dt;
  Field v_new = state.v;
  LinearSolveReport v_report;
  try {
    v_report = v_solver_.solve(v_rhs, (1.0 + dt * params.beta) / dt, v_new);
  } catch (const operators::NoConvergenceError& e) {
    throw StepFailure(StepFailure::Kind::Solver, state.t + dt, e.report().residual, "signal solve failed");
  }
  auto terms = chemotaxis_terms(state.u, v_new, params, density_flux(params.p));
  SimState next =
      update_density(state, std::move(v_new), terms.rate, terms.chemo, dt, terms.reaction_integral, terms.influx);
  next.v_report = v_report;
  return next;
}

SimState Stepper::step_nbc(const SimState& state, const NbcParams& nbc, double dt) {
  const auto flux = density_flux(nbc.P);
  Field rate(state.u.grid_ptr());
  for (std::size_t k = 0; k < rate.size(); ++k) {
    const double x = state.u[k];
    rate[k] = -nbc.mu * std::pow(std::abs(x), nbc.Q - 1.0) * x;
  }
  const double reaction_integral = grid::integrate(rate);
  double influx = 0.0;
  if (flux.is_power_law()) {
    rate += operators::boundary_source(state.u, flux);
    influx = grid::boundary_integral_pow(state.u, flux.exponent);
  }
  Field no_chemo(state.u.grid_ptr());
  Field v = state.v.size() == state.u.size() ? state.v : Field(state.u.grid_ptr());
  return update_density(state, std::move(v), rate, no_chemo, dt, reaction_integral, influx);
}

SimState Stepper::step(const SimState& state, const Problem& problem, double dt) {
  if (!(dt > 0.0)) throw Error("step requires dt > 0");
  if (const auto* ks = std::get_if<ModelParams>(&problem)) {
    return ks->tau == 0 ? step_parabolic_elliptic(state, *ks, dt) : step_parabolic_parabolic(state, *ks, dt);
  }
  return step_nbc(state, std::get<NbcParams>(problem), dt);
}

double adapt_dt(const SimState& state, const ModelParams& params, const StepperOptions& options) {
  const double max_u = std::max(0.0, state.u.max());
  double rate = chemotactic_outflow_rate(state.v, params.chi);
  if (max_u > 0.0) {
    rate += params.a + params.mu * max_u;
    if (options.boundary_flux) rate += params.p * std::pow(max_u, params.p - 1.0) / state.u.grid().min_spacing();
  }
  return finish_dt(rate, diffusion_guard(state.u), options);
}

double adapt_dt(const SimState& state, const NbcParams& nbc, const StepperOptions& options) {
  const double max_u = std::max(0.0, state.u.max());
  double rate = 0.0;
  if (max_u > 0.0) {
    rate += nbc.mu * std::pow(max_u, nbc.Q - 1.0);
    if (options.boundary_flux) rate += nbc.P * std::pow(max_u, nbc.P - 1.0) / state.u.grid().min_spacing();
  }
  return finish_dt(rate, diffusion_guard(state.u), options);
}

double adapt_dt(const SimState& state, const Problem& problem, const StepperOptions& options) {
  return std::visit([&](const auto& p) { return adapt_dt(state, p, options); }, problem);
}

}  // namespace ksnbc::stepper
