#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ksnbc/kernels.hpp"
#include "ksnbc/operators.hpp"
#include "oracles.hpp"

using namespace ksnbc;
using namespace ksnbc::operators;
using grid::Field;
using grid::Grid;
using std::numbers::pi;

namespace {

double inner(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s * a.grid().cell_volume();
}

Field random_field(const grid::GridPtr& g, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  oracle::Rng rng(seed);
  return Field(g, rng.vector(g->size(), lo, hi));
}

}  // namespace

TEST_CASE("discrete divergence theorem") {
  const auto g = Grid::rectangle(1.0, 1.5, 30, 20);
  const auto f = random_field(g, 1, 0.5, 2.0);
  CHECK(std::abs(grid::integrate(laplacian(f, FluxSpec::homogeneous()))) < 1e-11);
  for (double p : {1.2, 1.5, 2.0}) {
    const double total = grid::integrate(laplacian(f, FluxSpec::power_law(p)));
    CHECK(total == doctest::Approx(grid::boundary_integral_pow(f, p)).epsilon(1e-11));
    CHECK(grid::integrate(boundary_source(f, FluxSpec::power_law(p))) == doctest::Approx(total).epsilon(1e-11));
  }
  CHECK_THROWS((void)FluxSpec::power_law(1.0));
}

TEST_CASE("homogeneous Laplacian is symmetric and negative semidefinite") {
  const auto g = Grid::rectangle(1.0, 1.0, 17, 23);
  const auto a = random_field(g, 2, -1.0, 1.0);
  const auto b = random_field(g, 3, -1.0, 1.0);
  const auto la = laplacian(a, FluxSpec::homogeneous());
  const auto lb = laplacian(b, FluxSpec::homogeneous());
  CHECK(inner(la, b) == doctest::Approx(inner(a, lb)).epsilon(1e-12));
  CHECK(inner(la, a) <= 0.0);
  // summation by parts against the face quadrature
  CHECK(-inner(la, a) == doctest::Approx(grid::grad_sq_integral(a)).epsilon(1e-12));
}

TEST_CASE("Laplacian matches the ghost-cell oracle and annihilates constants") {
  const auto g = Grid::rectangle(2.0, 1.0, 20, 12);
  const auto f = random_field(g, 4);
  const auto lap = laplacian(f, FluxSpec::homogeneous());
  const auto ref = oracle::neumann_laplacian(20, 12, g->hx(), g->hy(), {f.values().begin(), f.values().end()});
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(lap[k] == doctest::Approx(ref[k]).epsilon(1e-12));
  const auto zero = laplacian(Field(g, 3.0), FluxSpec::homogeneous());
  CHECK(zero.max() == 0.0);
  CHECK(zero.min() == 0.0);
}

TEST_CASE("Laplacian is second-order accurate on a Neumann eigenfunction") {
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const auto g = Grid::rectangle(1.0, 1.0, n, n);
    const auto f = Field::sample(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
    const auto lap = laplacian(f, FluxSpec::homogeneous());
    double err = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) err = std::max(err, std::abs(lap[k] + 2.0 * pi * pi * f[k]));
    if (prev > 0.0) CHECK(std::log2(prev / err) > 1.9);
    prev = err;
  }
}

TEST_CASE("Laplacian preserves reflection symmetry") {
  const auto g = Grid::rectangle(1.0, 1.0, 20, 20);
  const auto f = Field::sample(g, [](double x, double y) { return std::exp(-20.0 * ((x - 0.5) * (x - 0.5) + y * y)); });
  const auto lap = laplacian(f, FluxSpec::power_law(1.4));
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) CHECK(lap.at(i, j) == doctest::Approx(lap.at(19 - i, j)).epsilon(1e-12));
}

TEST_CASE("chemotactic divergence conserves mass and vanishes for flat signals") {
  const auto g = Grid::rectangle(1.0, 1.0, 25, 25);
  const auto u = random_field(g, 5, 0.0, 3.0);
  const auto v = random_field(g, 6, -1.0, 1.0);
  CHECK(std::abs(grid::integrate(chemo_divergence(u, v))) < 1e-12);
  const auto flat = chemo_divergence(u, Field(g, 2.0));
  CHECK(flat.max() == 0.0);
  CHECK(flat.min() == 0.0);
}

TEST_CASE("Helmholtz backends agree and invert the operator") {
  for (auto g : {Grid::rectangle(1.0, 1.0, 48, 40), Grid::interval(1.0, 200)}) {
    const auto rhs = random_field(g, 7, -1.0, 1.0);
    for (double sigma : {0.1, 1.0, 50.0}) {
      SolverOptions cg;
      cg.backend = SolverBackend::ConjugateGradient;
      SolverOptions dct;
      dct.backend = SolverBackend::Spectral;
      const auto [wc, rc] = helmholtz_solve(rhs, sigma, cg);
      const auto [ws, rs] = helmholtz_solve(rhs, sigma, dct);
      CHECK(rc.converged);
      CHECK(rs.converged);
      CHECK(rc.backend == SolverBackend::ConjugateGradient);
      CHECK(rs.backend == SolverBackend::Spectral);
      const double scale = std::max(1.0, std::abs(ws.max()));
      for (std::size_t k = 0; k < rhs.size(); ++k) CHECK(std::abs(wc[k] - ws[k]) < 1e-8 * scale);

      // apply σ − Δ_h to the solution and compare with the right-hand side
      const auto back = sigma * ws - laplacian(ws, FluxSpec::homogeneous());
      for (std::size_t k = 0; k < rhs.size(); ++k) CHECK(back[k] == doctest::Approx(rhs[k]).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("Helmholtz solve of a constant right-hand side") {
  const auto g = Grid::rectangle(1.0, 1.0, 16, 16);
  const auto [w, rep] = helmholtz_solve(Field(g, 6.0), 2.0);
  CHECK(rep.converged);
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(w[k] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("automatic backend choice follows the condition estimate") {
  const auto g = Grid::rectangle(1.0, 1.0, 64, 64);
  HelmholtzSolver solver(g);
  CHECK(solver.choose_backend(1e6) == SolverBackend::ConjugateGradient);
  CHECK(solver.choose_backend(1e-3) == SolverBackend::Spectral);
}

TEST_CASE("solver reports non-convergence") {
  const auto g = Grid::rectangle(1.0, 1.0, 64, 64);
  SolverOptions o;
  o.backend = SolverBackend::ConjugateGradient;
  o.max_iterations = 2;
  o.tolerance = 1e-14;
  CHECK_THROWS_AS((void)helmholtz_solve(random_field(g, 9), 1e-3, o), NoConvergenceError);
}
