#include "ksnbc/operators.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "ksnbc/kernels.hpp"

namespace ksnbc::operators {

namespace {

kernels::Shape shape_of(const grid::Grid& g) { return {g.nx(), g.ny(), g.dim(), g.hx(), g.hy()}; }

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

double norm2(std::span<const double> x) { return std::sqrt(kernels::omp::dot(x, x)); }

}  // namespace

FluxSpec FluxSpec::power_law(double p) {
  if (!(p > 1.0)) throw Error("power-law boundary flux requires exponent > 1");
  return {Kind::PowerLaw, p};
}

const char* to_string(SolverBackend backend) {
  switch (backend) {
    case SolverBackend::Auto: return "auto";
    case SolverBackend::ConjugateGradient: return "cg";
    case SolverBackend::Spectral: return "dct";
  }
  return "unknown";
}

Field boundary_source(const Field& f, FluxSpec flux) {
  Field out(f.grid_ptr());
  if (!flux.is_power_law()) return out;
  const double inv_volume = 1.0 / f.grid().cell_volume();
  for (const auto& face : f.grid().boundary_faces()) {
    const double g = std::pow(std::abs(grid::face_trace(f, face)), flux.exponent);
    out[face.cell] += g * face.area * inv_volume;
  }
  return out;
}

Field laplacian(const Field& f, FluxSpec flux) {
  f.require_finite("laplacian");
  Field out(f.grid_ptr());
  kernels::omp::laplacian(shape_of(f.grid()), f.values(), out.values());
  if (flux.is_power_law()) out += boundary_source(f, flux);
  out.require_finite("laplacian");
  return out;
}

Field chemo_divergence(const Field& u, const Field& v) {
  u.require_finite("chemo_divergence");
  v.require_finite("chemo_divergence");
  if (!u.grid().same_shape(v.grid())) throw Error("chemo_divergence: fields live on different grids");
  Field out(u.grid_ptr());
  kernels::omp::chemo_divergence(shape_of(u.grid()), u.values(), v.values(), out.values());
  out.require_finite("chemo_divergence");
  return out;
}

NoConvergenceError::NoConvergenceError(LinearSolveReport report)
    : Error("linear solve did not converge: " + std::to_string(report.iterations) +
            " iterations, relative residual " + std::to_string(report.residual)),
      report_(report) {}

struct HelmholtzSolver::Spectral {
  int nx = 0;
  int ny = 1;
  double* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> eig_x, eig_y;

  explicit Spectral(const grid::Grid& g) : nx(g.nx()), ny(g.ny()) {
    buffer = static_cast<double*>(fftw_malloc(sizeof(double) * g.size()));
    {
      std::lock_guard lock(fftw_planner_mutex());
      if (g.dim() == 2) {
        forward = fftw_plan_r2r_2d(nx, ny, buffer, buffer, FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
        backward = fftw_plan_r2r_2d(nx, ny, buffer, buffer, FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
      } else {
        forward = fftw_plan_r2r_1d(nx, buffer, buffer, FFTW_REDFT10, FFTW_ESTIMATE);
        backward = fftw_plan_r2r_1d(nx, buffer, buffer, FFTW_REDFT01, FFTW_ESTIMATE);
      }
    }
    auto eigenvalues = [](int n, double h) {
      std::vector<double> lam(n);
      for (int k = 0; k < n; ++k) {
        const double s = std::sin(std::numbers::pi * k / (2.0 * n));
        lam[k] = 4.0 * s * s / (h * h);
      }
      return lam;
    };
    eig_x = eigenvalues(nx, g.hx());
    eig_y = g.dim() == 2 ? eigenvalues(ny, g.hy()) : std::vector<double>(1, 0.0);
  }

  ~Spectral() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(buffer);
  }

  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;
};

HelmholtzSolver::HelmholtzSolver(GridPtr grid, SolverOptions options)
    : grid_(std::move(grid)), options_(options) {
  const auto& g = *grid_;
  const std::size_t n = g.size();
  // Interior diagonal of −Δ_h. A per-cell (Jacobi) diagonal would differ only
  // at boundary cells and would turn a constant residual into a non-constant
  // search direction, so spatially constant states would drift.
  interior_diag_ = 2.0 / (g.hx() * g.hx()) + (g.dim() == 2 ? 2.0 / (g.hy() * g.hy()) : 0.0);
  r_.assign(n, 0.0);
  z_.assign(n, 0.0);
  p_.assign(n, 0.0);
  q_.assign(n, 0.0);
}

HelmholtzSolver::~HelmholtzSolver() = default;
HelmholtzSolver::HelmholtzSolver(HelmholtzSolver&&) noexcept = default;
HelmholtzSolver& HelmholtzSolver::operator=(HelmholtzSolver&&) noexcept = default;

SolverBackend HelmholtzSolver::choose_backend(double sigma) const {
  if (options_.backend != SolverBackend::Auto) return options_.backend;
  const auto& g = *grid_;
  double lambda_max = 4.0 / (g.hx() * g.hx());
  if (g.dim() == 2) lambda_max += 4.0 / (g.hy() * g.hy());
  const double condition = 1.0 + lambda_max / sigma;
  return condition <= options_.auto_condition_limit ? SolverBackend::ConjugateGradient : SolverBackend::Spectral;
}

LinearSolveReport HelmholtzSolver::solve(const Field& rhs, double sigma, Field& w) {
  if (!(sigma > 0.0)) throw Error("helmholtz solve requires sigma > 0");
  rhs.require_finite("helmholtz_solve");
  if (!rhs.grid().same_shape(*grid_) || !w.grid().same_shape(*grid_))
    throw Error("helmholtz solve: field grid does not match solver grid");
  if (!w.all_finite()) w = Field(grid_);
  LinearSolveReport report = choose_backend(sigma) == SolverBackend::Spectral ? solve_spectral(rhs, sigma, w)
                                                                               : solve_cg(rhs, sigma, w);
  if (!report.converged) throw NoConvergenceError(report);
  return report;
}

double HelmholtzSolver::relative_residual(const Field& rhs, double sigma, const Field& w) {
  const auto s = shape_of(*grid_);
  kernels::omp::helmholtz_apply(s, sigma, w.values(), q_);
  kernels::omp::xpby(rhs.values(), -1.0, q_);
  const double b = norm2(rhs.values());
  const double r = norm2(q_);
  return b > 0.0 ? r / b : r;
}

LinearSolveReport HelmholtzSolver::solve_cg(const Field& rhs, double sigma, Field& w) {
  const auto s = shape_of(*grid_);
  const std::size_t n = grid_->size();
  LinearSolveReport report;
  report.backend = SolverBackend::ConjugateGradient;

  const double b_norm = norm2(rhs.values());
  if (b_norm == 0.0) {
    for (double& x : w.values()) x = 0.0;
    report.converged = true;
    return report;
  }
  const double target = options_.tolerance * b_norm;

  // r = b − A w
  kernels::omp::helmholtz_apply(s, sigma, w.values(), r_);
  kernels::omp::xpby(rhs.values(), -1.0, r_);
  double r_norm = norm2(r_);
  if (r_norm <= target) {
    report.residual = r_norm / b_norm;
    report.converged = true;
    return report;
  }
  for (std::size_t k = 0; k < n; ++k) z_[k] = r_[k] / (sigma + interior_diag_);
  p_ = z_;
  double rz = kernels::omp::dot(r_, z_);

  for (int it = 1; it <= options_.max_iterations; ++it) {
    kernels::omp::helmholtz_apply(s, sigma, p_, q_);
    const double alpha = rz / kernels::omp::dot(p_, q_);
    kernels::omp::axpy(alpha, p_, w.values());
    kernels::omp::axpy(-alpha, q_, r_);
    r_norm = norm2(r_);
    report.iterations = it;
    if (r_norm <= target) break;
    for (std::size_t k = 0; k < n; ++k) z_[k] = r_[k] / (sigma + interior_diag_);
    const double rz_next = kernels::omp::dot(r_, z_);
    const double beta = rz_next / rz;
    rz = rz_next;
    kernels::omp::xpby(z_, beta, p_);
  }
  report.residual = r_norm / b_norm;
  report.converged = r_norm <= target && std::isfinite(r_norm);
  return report;
}

LinearSolveReport HelmholtzSolver::solve_spectral(const Field& rhs, double sigma, Field& w) {
  if (!spectral_) spectral_ = std::make_unique<Spectral>(*grid_);
  auto& sp = *spectral_;
  const std::size_t n = grid_->size();
  std::copy(rhs.values().begin(), rhs.values().end(), sp.buffer);
  fftw_execute(sp.forward);
  // REDFT10 followed by REDFT01 scales by 2N per transformed axis.
  const double scale = 1.0 / (2.0 * sp.nx * (grid_->dim() == 2 ? 2.0 * sp.ny : 1.0));
  for (int k = 0; k < sp.nx; ++k)
    for (int l = 0; l < sp.ny; ++l) {
      const std::size_t idx = static_cast<std::size_t>(k) * sp.ny + l;
      sp.buffer[idx] *= scale / (sigma + sp.eig_x[k] + sp.eig_y[grid_->dim() == 2 ? l : 0]);
    }
  fftw_execute(sp.backward);
  std::copy(sp.buffer, sp.buffer + n, w.values().begin());

  LinearSolveReport report;
  report.backend = SolverBackend::Spectral;
  report.iterations = 0;
  report.residual = relative_residual(rhs, sigma, w);
  report.converged = std::isfinite(report.residual) && report.residual <= options_.tolerance;
  return report;
}

std::pair<Field, LinearSolveReport> helmholtz_solve(const Field& rhs, double sigma, SolverOptions options) {
  HelmholtzSolver solver(rhs.grid_ptr(), options);
  Field w(rhs.grid_ptr());
  auto report = solver.solve(rhs, sigma, w);
  return {std::move(w), report};
}

}  // namespace ksnbc::operators
