#pragma once

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ksnbc/error.hpp"

namespace ksnbc::grid {

/// One boundary face of a boundary cell.
struct BoundaryFace {
  std::size_t cell;   ///< owning cell
  std::size_t inner;  ///< next cell inward along the face normal
  int axis;           ///< 0 = x, 1 = y
  int sign;           ///< outward normal direction along axis (−1 or +1)
  double area;        ///< face measure (1 in 1D)
  double spacing;     ///< cell spacing normal to the face
};

/// Uniform cell-centered mesh on [0, Lx] or [0, Lx] × [0, Ly].
///
/// Cells are stored row-major in (i, j): index = i·ny + j, with ny = 1 in 1D.
class Grid {
 public:
  static constexpr int kMinCells = 4;

  [[nodiscard]] static std::shared_ptr<const Grid> interval(double length, int cells);
  [[nodiscard]] static std::shared_ptr<const Grid> rectangle(double lx, double ly, int nx, int ny);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int nx() const { return nx_; }
  [[nodiscard]] int ny() const { return ny_; }
  [[nodiscard]] double lx() const { return lx_; }
  [[nodiscard]] double ly() const { return ly_; }
  [[nodiscard]] double hx() const { return hx_; }
  [[nodiscard]] double hy() const { return hy_; }
  [[nodiscard]] double min_spacing() const { return dim_ == 2 ? std::min(hx_, hy_) : hx_; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  [[nodiscard]] double cell_volume() const { return volume_; }
  [[nodiscard]] double measure() const { return dim_ == 2 ? lx_ * ly_ : lx_; }
  /// Perimeter in 2D; number of endpoints (each of unit measure) in 1D.
  [[nodiscard]] double boundary_measure() const { return dim_ == 2 ? 2.0 * (lx_ + ly_) : 2.0; }
  /// Area of faces normal to `axis`.
  [[nodiscard]] double face_area(int axis) const;

  [[nodiscard]] std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(j);
  }
  [[nodiscard]] double x(int i) const { return (i + 0.5) * hx_; }
  [[nodiscard]] double y(int j) const { return dim_ == 2 ? (j + 0.5) * hy_ : 0.0; }

  [[nodiscard]] const std::vector<BoundaryFace>& boundary_faces() const { return faces_; }

  [[nodiscard]] bool same_shape(const Grid& other) const;

 private:
  Grid(int dim, double lx, double ly, int nx, int ny);

  int dim_;
  int nx_, ny_;
  double lx_, ly_;
  double hx_, hy_;
  double volume_;
  std::vector<BoundaryFace> faces_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Scalar grid function, one value per cell.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid, double fill = 0.0);
  Field(GridPtr grid, std::vector<double> values);

  template <class Fn>
  [[nodiscard]] static Field sample(GridPtr grid, Fn&& fn) {
    Field f(grid);
    for (int i = 0; i < grid->nx(); ++i)
      for (int j = 0; j < grid->ny(); ++j) f.values_[grid->index(i, j)] = fn(grid->x(i), grid->y(j));
    return f;
  }

  [[nodiscard]] const Grid& grid() const { return *grid_; }
  [[nodiscard]] const GridPtr& grid_ptr() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::span<double> values() { return values_; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& at(int i, int j = 0) { return values_[grid_->index(i, j)]; }
  [[nodiscard]] double at(int i, int j = 0) const { return values_[grid_->index(i, j)]; }

  [[nodiscard]] bool all_finite() const;
  void require_finite(const char* where) const;
  [[nodiscard]] double max() const;
  [[nodiscard]] double min() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Discrete ∫_Ω f: cell values times cell volume, compensated summation.
[[nodiscard]] double integrate(const Field& f);

/// (∫|f|^r)^{1/r}; r = +inf gives max|f|.
[[nodiscard]] double lp_norm(const Field& f, double r);

/// ∫|f|^r over the domain (no root taken).
[[nodiscard]] double integrate_abs_pow(const Field& f, double r);

/// Prescribed outward normal derivative on the boundary.
struct NormalFlux {
  double exponent = 0.0;  ///< 0 selects homogeneous Neumann data; otherwise ∂f/∂ν = trace^exponent
  [[nodiscard]] bool homogeneous() const { return exponent == 0.0; }
};

/// Face-difference quadrature of ∫|∇f|². Boundary faces contribute half a
/// cell of the prescribed normal derivative squared (nothing for homogeneous data).
[[nodiscard]] double grad_sq_integral(const Field& f, NormalFlux flux = {});

/// One-sided linear extrapolation of f to a boundary face, 1.5·f₀ − 0.5·f₁.
/// When both source values are nonnegative the trace is floored at 0.
[[nodiscard]] double face_trace(const Field& f, const BoundaryFace& face);

/// Σ_faces |trace f|^q × area.
[[nodiscard]] double boundary_integral_pow(const Field& f, double q);

/// Cell-centered gradient from averaging the two adjoining face differences
/// (boundary faces carry zero difference). Returns |∇f|² per cell.
[[nodiscard]] Field cell_grad_sq(const Field& f);

/// Snapshot CSV: header "i[,j],x[,y],value", cells in storage order.
void write_csv(std::ostream& out, const Field& f);
void write_csv(const std::string& path, const Field& f);
[[nodiscard]] Field read_csv(const std::string& path, GridPtr grid);

}  // namespace ksnbc::grid
