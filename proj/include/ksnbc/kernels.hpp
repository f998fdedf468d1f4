#pragma once

// Grid kernels in two flavors.
//
//   serial:: straightforward single-threaded loops. This is the reference
//            implementation the tests compare against.
//   omp::    the same stencils with OpenMP work sharing. Reductions are split
//            into fixed-size chunks whose partial sums are combined in chunk
//            order, so results do not depend on the thread count.
//
// Stencils operate on cell-centered data stored row-major (index = i·ny + j)
// with homogeneous Neumann closure: boundary faces carry no flux.

#include <cstddef>
#include <span>

namespace ksnbc::kernels {

struct Shape {
  int nx = 0;
  int ny = 1;
  int dim = 1;
  double hx = 1.0;
  double hy = 1.0;
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

/// Chunk length for the ordered parallel reductions.
inline constexpr std::size_t kReductionChunk = 2048;

/// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if ((sum >= 0 ? sum : -sum) >= (x >= 0 ? x : -x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  [[nodiscard]] double value() const { return sum + carry; }
};

namespace serial {

/// out = Δ_h f with homogeneous Neumann closure.
void laplacian(const Shape& s, std::span<const double> f, std::span<double> out);
/// out = σ·f − Δ_h f.
void helmholtz_apply(const Shape& s, double sigma, std::span<const double> f, std::span<double> out);
/// out = ∇·(u∇v): central face gradient of v, u upwinded along that gradient.
void chemo_divergence(const Shape& s, std::span<const double> u, std::span<const double> v, std::span<double> out);

[[nodiscard]] double sum(std::span<const double> x);
[[nodiscard]] double dot(std::span<const double> x, std::span<const double> y);
/// Σ|x|^r.
[[nodiscard]] double sum_abs_pow(std::span<const double> x, double r);
[[nodiscard]] double max_value(std::span<const double> x);
[[nodiscard]] double min_value(std::span<const double> x);

/// y += a·x.
void axpy(double a, std::span<const double> x, std::span<double> y);
/// y = x + b·y.
void xpby(std::span<const double> x, double b, std::span<double> y);

}  // namespace serial

namespace omp {

void laplacian(const Shape& s, std::span<const double> f, std::span<double> out);
void helmholtz_apply(const Shape& s, double sigma, std::span<const double> f, std::span<double> out);
void chemo_divergence(const Shape& s, std::span<const double> u, std::span<const double> v, std::span<double> out);

[[nodiscard]] double sum(std::span<const double> x);
[[nodiscard]] double dot(std::span<const double> x, std::span<const double> y);
[[nodiscard]] double sum_abs_pow(std::span<const double> x, double r);
[[nodiscard]] double max_value(std::span<const double> x);
[[nodiscard]] double min_value(std::span<const double> x);

void axpy(double a, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double b, std::span<double> y);

}  // namespace omp

/// Number of OpenMP threads available to the omp:: kernels (1 without OpenMP).
[[nodiscard]] int max_threads();

}  // namespace ksnbc::kernels
