#include "ksnbc/grid.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ksnbc/format.hpp"
#include "ksnbc/kernels.hpp"

namespace ksnbc::grid {

Grid::Grid(int dim, double lx, double ly, int nx, int ny)
    : dim_(dim), nx_(nx), ny_(ny), lx_(lx), ly_(ly), hx_(lx / nx), hy_(dim == 2 ? ly / ny : 1.0) {
  volume_ = dim_ == 2 ? hx_ * hy_ : hx_;
  const double ax = face_area(0);
  for (int j = 0; j < ny_; ++j) {
    faces_.push_back({index(0, j), index(1, j), 0, -1, ax, hx_});
    faces_.push_back({index(nx_ - 1, j), index(nx_ - 2, j), 0, +1, ax, hx_});
  }
  if (dim_ == 2) {
    const double ay = face_area(1);
    for (int i = 0; i < nx_; ++i) {
      faces_.push_back({index(i, 0), index(i, 1), 1, -1, ay, hy_});
      faces_.push_back({index(i, ny_ - 1), index(i, ny_ - 2), 1, +1, ay, hy_});
    }
  }
}

std::shared_ptr<const Grid> Grid::interval(double length, int cells) {
  if (!(length > 0.0) || !std::isfinite(length)) throw Error("grid length must be positive and finite");
  if (cells < kMinCells) throw Error("grid needs at least 4 cells per axis");
  return std::shared_ptr<const Grid>(new Grid(1, length, 1.0, cells, 1));
}

std::shared_ptr<const Grid> Grid::rectangle(double lx, double ly, int nx, int ny) {
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw Error("grid extents must be positive and finite");
  if (nx < kMinCells || ny < kMinCells) throw Error("grid needs at least 4 cells per axis");
  return std::shared_ptr<const Grid>(new Grid(2, lx, ly, nx, ny));
}

double Grid::face_area(int axis) const {
  if (dim_ == 1) return 1.0;
  return axis == 0 ? hy_ : hx_;
}

bool Grid::same_shape(const Grid& other) const {
  return dim_ == other.dim_ && nx_ == other.nx_ && ny_ == other.ny_ && lx_ == other.lx_ && ly_ == other.ly_;
}

Field::Field(GridPtr grid, double fill) : grid_(std::move(grid)), values_(grid_->size(), fill) {}

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw Error("field value count does not match grid cell count");
}

bool Field::all_finite() const {
  for (double x : values_)
    if (!std::isfinite(x)) return false;
  return true;
}

void Field::require_finite(const char* where) const {
  if (!all_finite()) throw NonFiniteError(where);
}

double Field::max() const { return kernels::omp::max_value(values_); }
double Field::min() const { return kernels::omp::min_value(values_); }

Field& Field::operator+=(const Field& other) {
  kernels::omp::axpy(1.0, other.values_, values_);
  return *this;
}

Field& Field::operator-=(const Field& other) {
  kernels::omp::axpy(-1.0, other.values_, values_);
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& x : values_) x *= s;
  return *this;
}

double integrate(const Field& f) {
  f.require_finite("integrate");
  return kernels::omp::sum(f.values()) * f.grid().cell_volume();
}

double integrate_abs_pow(const Field& f, double r) {
  f.require_finite("integrate_abs_pow");
  return kernels::omp::sum_abs_pow(f.values(), r) * f.grid().cell_volume();
}

double lp_norm(const Field& f, double r) {
  if (!(r >= 1.0)) throw Error("lp_norm requires r >= 1");
  f.require_finite("lp_norm");
  if (std::isinf(r)) return std::max(std::abs(f.max()), std::abs(f.min()));
  const double integral = integrate_abs_pow(f, r);
  return r == 1.0 ? integral : std::pow(integral, 1.0 / r);
}

double face_trace(const Field& f, const BoundaryFace& face) {
  const double f0 = f[face.cell];
  const double f1 = f[face.inner];
  const double t = 1.5 * f0 - 0.5 * f1;
  if (t < 0.0 && f0 >= 0.0 && f1 >= 0.0) return 0.0;
  return t;
}

double grad_sq_integral(const Field& f, NormalFlux flux) {
  f.require_finite("grad_sq_integral");
  const Grid& g = f.grid();
  kernels::CompensatedSum acc;
  // (Δf/h)² · area · h = Δf² · area / h
  const double wx = g.face_area(0) / g.hx();
  for (int i = 0; i + 1 < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      const double d = f.at(i + 1, j) - f.at(i, j);
      acc.add(d * d * wx);
    }
  if (g.dim() == 2) {
    const double wy = g.face_area(1) / g.hy();
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j + 1 < g.ny(); ++j) {
        const double d = f.at(i, j + 1) - f.at(i, j);
        acc.add(d * d * wy);
      }
  }
  if (!flux.homogeneous()) {
    for (const auto& face : g.boundary_faces()) {
      const double slope = std::pow(std::abs(face_trace(f, face)), flux.exponent);
      acc.add(slope * slope * face.area * 0.5 * face.spacing);
    }
  }
  return acc.value();
}

double boundary_integral_pow(const Field& f, double q) {
  if (!(q > 0.0)) throw Error("boundary_integral_pow requires q > 0");
  f.require_finite("boundary_integral_pow");
  kernels::CompensatedSum acc;
  for (const auto& face : f.grid().boundary_faces()) acc.add(std::pow(std::abs(face_trace(f, face)), q) * face.area);
  return acc.value();
}

Field cell_grad_sq(const Field& f) {
  const Grid& g = f.grid();
  Field out(f.grid_ptr());
  const int nx = g.nx();
  const int ny = g.ny();
  const double hx = g.hx();
  const double hy = g.hy();
  const bool planar = g.dim() == 2;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double c = f.at(i, j);
      const double left = i > 0 ? (c - f.at(i - 1, j)) / hx : 0.0;
      const double right = i + 1 < nx ? (f.at(i + 1, j) - c) / hx : 0.0;
      const double gx = 0.5 * (left + right);
      double gy = 0.0;
      if (planar) {
        const double down = j > 0 ? (c - f.at(i, j - 1)) / hy : 0.0;
        const double up = j + 1 < ny ? (f.at(i, j + 1) - c) / hy : 0.0;
        gy = 0.5 * (down + up);
      }
      out.at(i, j) = gx * gx + gy * gy;
    }
  }
  return out;
}

void write_csv(std::ostream& out, const Field& f) {
  const Grid& g = f.grid();
  out << (g.dim() == 2 ? "i,j,x,y,value\n" : "i,x,value\n");
  for (int i = 0; i < g.nx(); ++i) {
    for (int j = 0; j < g.ny(); ++j) {
      out << i << ',';
      if (g.dim() == 2) out << j << ',';
      out << format_double(g.x(i)) << ',';
      if (g.dim() == 2) out << format_double(g.y(j)) << ',';
      out << format_double(f.at(i, j)) << '\n';
    }
  }
}

void write_csv(const std::string& path, const Field& f) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_csv(out, f);
}

Field read_csv(const std::string& path, GridPtr grid) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open field file " + path);
  const bool planar = grid->dim() == 2;
  std::string line;
  std::getline(in, line);
  const std::string expected = planar ? "i,j,x,y,value" : "i,x,value";
  if (line != expected) throw Error(path + ": expected header '" + expected + "'");
  Field f(grid, std::numeric_limits<double>::quiet_NaN());
  std::size_t rows = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> parts;
    while (std::getline(ss, cell, ',')) parts.push_back(cell);
    if (parts.size() != (planar ? 5u : 3u)) throw Error(path + ":" + std::to_string(lineno) + ": wrong column count");
    const std::string where = path + ":" + std::to_string(lineno);
    const int i = parse_int(parts[0], where);
    const int j = planar ? parse_int(parts[1], where) : 0;
    if (i < 0 || i >= grid->nx() || j < 0 || j >= grid->ny())
      throw Error(path + ":" + std::to_string(lineno) + ": cell index out of range");
    f.at(i, j) = parse_double(parts.back(), where);
    ++rows;
  }
  if (rows != grid->size() || !f.all_finite())
    throw Error(path + ": expected " + std::to_string(grid->size()) + " finite cell values");
  return f;
}

}  // namespace ksnbc::grid
