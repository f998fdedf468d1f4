#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ksnbc/kernels.hpp"
#include "ksnbc/operators.hpp"

using namespace ksnbc;

namespace {

kernels::Shape square(int n) { return {n, n, 2, 1.0 / n, 1.0 / n}; }

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

template <void (*Kernel)(const kernels::Shape&, std::span<const double>, std::span<double>)>
void BM_Laplacian(benchmark::State& state) {
  const auto s = square(static_cast<int>(state.range(0)));
  const auto f = random_values(s.size(), 1);
  std::vector<double> out(s.size());
  for (auto _ : state) {
    Kernel(s, f, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.size()));
}

template <void (*Kernel)(const kernels::Shape&, std::span<const double>, std::span<const double>, std::span<double>)>
void BM_Chemotaxis(benchmark::State& state) {
  const auto s = square(static_cast<int>(state.range(0)));
  const auto u = random_values(s.size(), 2);
  const auto v = random_values(s.size(), 3);
  std::vector<double> out(s.size());
  for (auto _ : state) {
    Kernel(s, u, v, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.size()));
}

template <double (*Kernel)(std::span<const double>, std::span<const double>)>
void BM_Dot(benchmark::State& state) {
  const auto x = random_values(static_cast<std::size_t>(state.range(0)) * state.range(0), 4);
  const auto y = random_values(x.size(), 5);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x, y));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()));
}

void BM_HelmholtzSolve(benchmark::State& state, operators::SolverBackend backend) {
  const int n = static_cast<int>(state.range(0));
  const auto g = grid::Grid::rectangle(1.0, 1.0, n, n);
  const grid::Field rhs(g, random_values(g->size(), 6));
  operators::SolverOptions options;
  options.backend = backend;
  operators::HelmholtzSolver solver(g, options);
  // σ = 1/dt for a typical step on this grid
  const double sigma = 1.0 / (0.5 * g->hx());
  for (auto _ : state) {
    grid::Field w(g, 0.0);
    benchmark::DoNotOptimize(solver.solve(rhs, sigma, w));
  }
}

}  // namespace

BENCHMARK(BM_Laplacian<kernels::serial::laplacian>)->Name("laplacian/serial")->Arg(128)->Arg(512);
BENCHMARK(BM_Laplacian<kernels::omp::laplacian>)->Name("laplacian/omp")->Arg(128)->Arg(512);
BENCHMARK(BM_Chemotaxis<kernels::serial::chemo_divergence>)->Name("chemo_divergence/serial")->Arg(128)->Arg(512);
BENCHMARK(BM_Chemotaxis<kernels::omp::chemo_divergence>)->Name("chemo_divergence/omp")->Arg(128)->Arg(512);
BENCHMARK(BM_Dot<kernels::serial::dot>)->Name("dot/serial")->Arg(128)->Arg(512);
BENCHMARK(BM_Dot<kernels::omp::dot>)->Name("dot/omp")->Arg(128)->Arg(512);
BENCHMARK_CAPTURE(BM_HelmholtzSolve, cg, operators::SolverBackend::ConjugateGradient)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_HelmholtzSolve, dct, operators::SolverBackend::Spectral)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
