#include "ksnbc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ksnbc::kernels {

namespace {

// Upwinded face term of ∇·(u∇v) seen from cell `self` towards `nb`.
inline double upwind_term(double u_self, double u_nb, double v_self, double v_nb) {
  const double dv = v_nb - v_self;
  return (dv > 0.0 ? u_self : u_nb) * dv;
}

inline double abs_pow(double x, double r) {
  const double a = std::abs(x);
  if (r == 1.0) return a;
  if (r == 2.0) return a * a;
  return std::pow(a, r);
}

std::size_t chunk_count(std::size_t n) { return (n + kReductionChunk - 1) / kReductionChunk; }

template <class Term>
double ordered_parallel_sum(std::size_t n, Term term) {
  const std::size_t chunks = chunk_count(n);
  std::vector<double> partial(chunks, 0.0);
  const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    CompensatedSum acc;
    const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
    const std::size_t end = std::min(n, begin + kReductionChunk);
    for (std::size_t k = begin; k < end; ++k) acc.add(term(k));
    partial[static_cast<std::size_t>(c)] = acc.value();
  }
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

}  // namespace

namespace serial {

void laplacian(const Shape& s, std::span<const double> f, std::span<double> out) {
  const double cx = 1.0 / (s.hx * s.hx);
  const double cy = s.dim == 2 ? 1.0 / (s.hy * s.hy) : 0.0;
  for (int i = 0; i < s.nx; ++i) {
    for (int j = 0; j < s.ny; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * s.ny + j;
      double acc = 0.0;
      if (i > 0) acc += cx * (f[k - s.ny] - f[k]);
      if (i + 1 < s.nx) acc += cx * (f[k + s.ny] - f[k]);
      if (s.dim == 2) {
        if (j > 0) acc += cy * (f[k - 1] - f[k]);
        if (j + 1 < s.ny) acc += cy * (f[k + 1] - f[k]);
      }
      out[k] = acc;
    }
  }
}

void helmholtz_apply(const Shape& s, double sigma, std::span<const double> f, std::span<double> out) {
  laplacian(s, f, out);
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = sigma * f[k] - out[k];
}

void chemo_divergence(const Shape& s, std::span<const double> u, std::span<const double> v, std::span<double> out) {
  const double cx = 1.0 / (s.hx * s.hx);
  const double cy = s.dim == 2 ? 1.0 / (s.hy * s.hy) : 0.0;
  for (int i = 0; i < s.nx; ++i) {
    for (int j = 0; j < s.ny; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * s.ny + j;
      double acc = 0.0;
      if (i > 0) acc += cx * upwind_term(u[k], u[k - s.ny], v[k], v[k - s.ny]);
      if (i + 1 < s.nx) acc += cx * upwind_term(u[k], u[k + s.ny], v[k], v[k + s.ny]);
      if (s.dim == 2) {
        if (j > 0) acc += cy * upwind_term(u[k], u[k - 1], v[k], v[k - 1]);
        if (j + 1 < s.ny) acc += cy * upwind_term(u[k], u[k + 1], v[k], v[k + 1]);
      }
      out[k] = acc;
    }
  }
}

double sum(std::span<const double> x) {
  CompensatedSum acc;
  for (double value : x) acc.add(value);
  return acc.value();
}

double dot(std::span<const double> x, std::span<const double> y) {
  CompensatedSum acc;
  for (std::size_t k = 0; k < x.size(); ++k) acc.add(x[k] * y[k]);
  return acc.value();
}

double sum_abs_pow(std::span<const double> x, double r) {
  CompensatedSum acc;
  for (double value : x) acc.add(abs_pow(value, r));
  return acc.value();
}

double max_value(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double value : x) m = std::max(m, value);
  return m;
}

double min_value(std::span<const double> x) {
  double m = std::numeric_limits<double>::infinity();
  for (double value : x) m = std::min(m, value);
  return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += a * x[k];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] + b * y[k];
}

}  // namespace serial

namespace omp {

void laplacian(const Shape& s, std::span<const double> f, std::span<double> out) {
  const double cx = 1.0 / (s.hx * s.hx);
  const double cy = s.dim == 2 ? 1.0 / (s.hy * s.hy) : 0.0;
  const int nx = s.nx;
  const int ny = s.ny;
  const double* in = f.data();
  double* res = out.data();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nx; ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * ny;
    for (int j = 0; j < ny; ++j) {
      const std::size_t k = row + j;
      double acc = 0.0;
      if (i > 0) acc += cx * (in[k - ny] - in[k]);
      if (i + 1 < nx) acc += cx * (in[k + ny] - in[k]);
      if (s.dim == 2) {
        if (j > 0) acc += cy * (in[k - 1] - in[k]);
        if (j + 1 < ny) acc += cy * (in[k + 1] - in[k]);
      }
      res[k] = acc;
    }
  }
}

void helmholtz_apply(const Shape& s, double sigma, std::span<const double> f, std::span<double> out) {
  const double cx = 1.0 / (s.hx * s.hx);
  const double cy = s.dim == 2 ? 1.0 / (s.hy * s.hy) : 0.0;
  const int nx = s.nx;
  const int ny = s.ny;
  const double* in = f.data();
  double* res = out.data();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nx; ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * ny;
    for (int j = 0; j < ny; ++j) {
      const std::size_t k = row + j;
      double acc = 0.0;
      if (i > 0) acc += cx * (in[k - ny] - in[k]);
      if (i + 1 < nx) acc += cx * (in[k + ny] - in[k]);
      if (s.dim == 2) {
        if (j > 0) acc += cy * (in[k - 1] - in[k]);
        if (j + 1 < ny) acc += cy * (in[k + 1] - in[k]);
      }
      res[k] = sigma * in[k] - acc;
    }
  }
}

void chemo_divergence(const Shape& s, std::span<const double> u, std::span<const double> v, std::span<double> out) {
  const double cx = 1.0 / (s.hx * s.hx);
  const double cy = s.dim == 2 ? 1.0 / (s.hy * s.hy) : 0.0;
  const int nx = s.nx;
  const int ny = s.ny;
  const double* pu = u.data();
  const double* pv = v.data();
  double* res = out.data();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nx; ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * ny;
    for (int j = 0; j < ny; ++j) {
      const std::size_t k = row + j;
      double acc = 0.0;
      if (i > 0) acc += cx * upwind_term(pu[k], pu[k - ny], pv[k], pv[k - ny]);
      if (i + 1 < nx) acc += cx * upwind_term(pu[k], pu[k + ny], pv[k], pv[k + ny]);
      if (s.dim == 2) {
        if (j > 0) acc += cy * upwind_term(pu[k], pu[k - 1], pv[k], pv[k - 1]);
        if (j + 1 < ny) acc += cy * upwind_term(pu[k], pu[k + 1], pv[k], pv[k + 1]);
      }
      res[k] = acc;
    }
  }
}

double sum(std::span<const double> x) {
  return ordered_parallel_sum(x.size(), [p = x.data()](std::size_t k) { return p[k]; });
}

double dot(std::span<const double> x, std::span<const double> y) {
  return ordered_parallel_sum(x.size(), [px = x.data(), py = y.data()](std::size_t k) { return px[k] * py[k]; });
}

double sum_abs_pow(std::span<const double> x, double r) {
  return ordered_parallel_sum(x.size(), [p = x.data(), r](std::size_t k) { return abs_pow(p[k], r); });
}

double max_value(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const double* p = x.data();
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) m = std::max(m, p[k]);
  return m;
}

double min_value(std::span<const double> x) {
  double m = std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const double* p = x.data();
#pragma omp parallel for reduction(min : m) schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) m = std::min(m, p[k]);
  return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const double* px = x.data();
  double* py = y.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) py[k] += a * px[k];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const double* px = x.data();
  double* py = y.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) py[k] = px[k] + b * py[k];
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ksnbc::kernels
