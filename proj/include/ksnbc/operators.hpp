#pragma once

#include <memory>
#include <utility>

#include "ksnbc/grid.hpp"

namespace ksnbc::operators {

using grid::Field;
using grid::GridPtr;

/// Outward normal-derivative data for the diffusion operator.
struct FluxSpec {
  enum class Kind { Homogeneous, PowerLaw };
  Kind kind = Kind::Homogeneous;
  double exponent = 0.0;

  [[nodiscard]] static FluxSpec homogeneous() { return {}; }
  /// ∂f/∂ν = |trace f|^p, p > 1.
  [[nodiscard]] static FluxSpec power_law(double p);
  [[nodiscard]] bool is_power_law() const { return kind == Kind::PowerLaw; }
};

/// Δ_h f with the given boundary data. Interior faces carry (difference / h) × area,
/// boundary faces the prescribed normal derivative × area; a positive
/// normal derivative adds mass to the owning cell.
[[nodiscard]] Field laplacian(const Field& f, FluxSpec flux);

/// Boundary part of laplacian(f, flux) alone: per cell Σ (trace^p × area) / volume.
[[nodiscard]] Field boundary_source(const Field& f, FluxSpec flux);

/// ∇·(u∇v) with central face gradients of v and u taken from the upwind side
/// of that gradient. Boundary faces carry no flux (∂v/∂ν = 0).
[[nodiscard]] Field chemo_divergence(const Field& u, const Field& v);

enum class SolverBackend { Auto, ConjugateGradient, Spectral };

[[nodiscard]] const char* to_string(SolverBackend backend);

struct SolverOptions {
  double tolerance = 1e-10;  ///< relative residual ‖b − Aw‖₂ / ‖b‖₂
  int max_iterations = 10000;
  SolverBackend backend = SolverBackend::Auto;
  /// Auto picks CG when the estimated condition number 1 + λ_max(−Δ_h)/σ is at most this.
  double auto_condition_limit = 200.0;
};

struct LinearSolveReport {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  SolverBackend backend = SolverBackend::ConjugateGradient;
};

class NoConvergenceError : public Error {
 public:
  explicit NoConvergenceError(LinearSolveReport report);
  [[nodiscard]] const LinearSolveReport& report() const { return report_; }

 private:
  LinearSolveReport report_;
};

/// Solver for (σI − Δ_h) w = rhs with homogeneous Neumann closure.
///
/// Backends: diagonally scaled conjugate gradients, and an exact
/// cosine-transform solve (the cell-centered Neumann Laplacian on a
/// rectangle is diagonal in the DCT-II basis). One instance owns scratch
/// buffers and transform plans for its grid; it is not thread-safe, but
/// separate instances may be used concurrently.
class HelmholtzSolver {
 public:
  HelmholtzSolver(GridPtr grid, SolverOptions options = {});
  ~HelmholtzSolver();
  HelmholtzSolver(HelmholtzSolver&&) noexcept;
  HelmholtzSolver& operator=(HelmholtzSolver&&) noexcept;

  /// Solves in place; `w` holds the initial guess on entry (used by CG).
  /// Throws NoConvergenceError when the residual target is missed.
  LinearSolveReport solve(const Field& rhs, double sigma, Field& w);

  [[nodiscard]] const SolverOptions& options() const { return options_; }
  [[nodiscard]] SolverBackend choose_backend(double sigma) const;

 private:
  LinearSolveReport solve_cg(const Field& rhs, double sigma, Field& w);
  LinearSolveReport solve_spectral(const Field& rhs, double sigma, Field& w);
  [[nodiscard]] double relative_residual(const Field& rhs, double sigma, const Field& w);

  struct Spectral;

  GridPtr grid_;
  SolverOptions options_;
  double interior_diag_ = 0.0;  // diagonal of −Δ_h away from the boundary
  std::vector<double> r_, z_, p_, q_;
  std::unique_ptr<Spectral> spectral_;
};

/// One-shot convenience wrapper; zero initial guess.
[[nodiscard]] std::pair<Field, LinearSolveReport> helmholtz_solve(const Field& rhs, double sigma,
                                                                  SolverOptions options = {});

}  // namespace ksnbc::operators
