#include "ksnbc/inequality_lab.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "ksnbc/format.hpp"
#include "ksnbc/kernels.hpp"

namespace ksnbc::ineq {

namespace {

constexpr double kGrowthFactor = 2.0;

using Terms = InequalityTerms;

using TermFn = std::function<Terms(const Field&)>;

Field abs_pow(const Field& f, double r) {
  Field out(f.grid_ptr());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = std::pow(std::abs(f[k]), r);
  return out;
}

using Parameters = std::vector<std::pair<std::string, double>>;

double param(const std::string& lemma, const Parameters& parameters, const std::string& name) {
  for (const auto& [key, value] : parameters)
    if (key == name) return value;
  throw Error("parameters for " + lemma + " have no '" + name + "'");
}

// ∫_∂Ω|g|^{p+2r−1} on the left; ∫|g|^{2r+1} + ∫|∇|g|^r|² as the bulk part.
std::pair<double, double> trace_parts(const Field& g, double r, double p) {
  const Field a = abs_pow(g, 1.0);
  const double lhs = grid::boundary_integral_pow(a, p + 2.0 * r - 1.0);
  const double bulk = grid::integrate_abs_pow(g, 2.0 * r + 1.0) + grid::grad_sq_integral(abs_pow(g, r));
  return {lhs, bulk};
}

TermFn gny_terms(double eta) {
  return [eta](const Field& f) {
    const double n = f.grid().dim();
    const double l1 = grid::integrate_abs_pow(f, 1.0);
    return Terms{grid::integrate_abs_pow(f, 2.0), 0.0,
                 eta * grid::grad_sq_integral(f) + std::pow(eta, -0.5 * n) * l1 * l1};
  };
}

TermFn trace_terms(double r, double p, double eps) {
  return [=](const Field& g) {
    const auto [lhs, bulk] = trace_parts(g, r, p);
    return Terms{lhs, eps * bulk, 1.0};
  };
}

TermFn reg_terms(double r, double p, double eta) {
  return [=](const Field& g) {
    const double n = g.grid().dim();
    const auto [lhs, bulk] = trace_parts(g, r, p);
    const double mass = grid::integrate_abs_pow(g, r);
    return Terms{lhs, eta * bulk, std::pow(eta, (n + 2.0) / (2.0 * p - 3.0)) * mass * mass};
  };
}

TermFn unif_gn_terms(double r, double p, double eta) {
  return [=](const Field& u) {
    kernels::CompensatedSum ulnu;
    for (double x : u.values()) {
      const double a = std::abs(x);
      if (a > 0.0) ulnu.add(std::pow(std::abs(a * std::log(a)), r));
    }
    const double entropy = ulnu.value() * u.grid().cell_volume();
    const double grad = std::pow(grid::grad_sq_integral(u), 0.5 * (p - r));
    return Terms{grid::integrate_abs_pow(u, p), eta * grad * entropy,
                 std::pow(grid::integrate_abs_pow(u, r), p / r)};
  };
}

TermFn terms_for(const std::string& lemma, const Parameters& ps) {
  auto get = [&](const char* name) { return param(lemma, ps, name); };
  if (lemma == "gny") return gny_terms(get("eta"));
  if (lemma == "boundary_trace") return trace_terms(get("r"), get("p"), get("eps"));
  if (lemma == "boundary_reg") return reg_terms(get("r"), get("p"), get("eta"));
  if (lemma == "unif_gn") return unif_gn_terms(get("r"), get("p"), get("eta"));
  throw Error("unknown lemma id '" + lemma + "'");
}

TermFn terms_for(const ConstantFitReport& report) { return terms_for(report.lemma, report.parameters); }

bool has_additive_constant(const std::string& lemma) { return lemma == "unif_gn"; }

std::vector<Terms> evaluate(const FieldEnsemble& ensemble, int cells, const TermFn& fn) {
  const GridPtr g = ensemble.grid(cells);
  std::vector<Terms> out(ensemble.size());
  const long n = static_cast<long>(ensemble.size());
  // Members are independent; each thread samples and reduces its own fields.
#pragma omp parallel for schedule(dynamic)
  for (long m = 0; m < n; ++m) out[m] = fn(ensemble.sample(static_cast<std::size_t>(m), g));
  return out;
}

ResolutionFit fit(const std::vector<Terms>& terms, bool additive) {
  ResolutionFit out;
  double d = 0.0;
  if (additive) {
    // Members with no C-term can only be covered by C(η).
    for (const auto& t : terms)
      if (t.coef == 0.0) d = std::max(d, t.lhs - t.base);
  }
  out.secondary = d;
  out.required.resize(terms.size(), 0.0);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double excess = terms[k].lhs - terms[k].base - d;
    double need = 0.0;
    if (excess > 0.0) need = terms[k].coef > 0.0 ? excess / terms[k].coef : std::numeric_limits<double>::infinity();
    out.required[k] = need;
    if (need > out.constant || (out.attaining_index < 0 && need > 0.0)) {
      out.constant = need;
      out.attaining_index = static_cast<long>(k);
    }
  }
  return out;
}

ConstantFitReport run_fit(const FieldEnsemble& ensemble, const std::vector<int>& resolutions, ConstantFitReport report) {
  if (resolutions.empty()) throw Error("inequality check needs at least one resolution");
  report.seed = ensemble.spec().seed;
  const TermFn fn = terms_for(report);
  const bool additive = has_additive_constant(report.lemma);
  for (int cells : resolutions) {
    auto f = fit(evaluate(ensemble, cells, fn), additive);
    f.cells = cells;
    report.fits.push_back(std::move(f));
  }
  const auto& coarse = report.fits.front().required;
  const auto& fine = report.fits.back().required;
  const double scale = report.fits.front().constant;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    if (fine[k] > kGrowthFactor * coarse[k] + 1e-12 * scale) report.flagged_members.push_back(k);
  }
  report.flagged = !report.flagged_members.empty();
  return report;
}

void require_exponents(double r, double p) {
  if (!(p > 1.0 && p < 1.5)) throw Error("boundary inequalities need p in (1, 3/2)");
  if (!(r >= 0.5)) throw Error("boundary inequalities need r >= 1/2");
}

}  // namespace

const char* to_string(Family family) {
  switch (family) {
    case Family::Trigonometric: return "trig";
    case Family::Cosine: return "cosine";
    case Family::BoundaryBump: return "boundary-bump";
    case Family::Mixed: return "mixed";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  for (auto f : {Family::Trigonometric, Family::Cosine, Family::BoundaryBump, Family::Mixed})
    if (name == to_string(f)) return f;
  throw Error("unknown ensemble family '" + name + "' (expected trig, cosine, boundary-bump or mixed)");
}

FieldEnsemble::FieldEnsemble(EnsembleSpec spec) : spec_(spec) {
  if (spec_.count < 0) throw Error("ensemble count must be >= 0");
  if (spec_.dim != 1 && spec_.dim != 2) throw Error("ensembles support dim 1 or 2");
  if (spec_.max_wavenumber < 1) throw Error("max_wavenumber must be >= 1");
  if (!(spec_.amplitude > 0.0) || !(spec_.lx > 0.0) || !(spec_.ly > 0.0))
    throw Error("ensemble amplitude and extents must be positive");

  std::mt19937_64 rng(spec_.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int K = spec_.max_wavenumber;
  const int ky_max = spec_.dim == 2 ? K : 0;
  const double two_pi = 2.0 * std::numbers::pi;

  members_.resize(static_cast<std::size_t>(spec_.count));
  for (int m = 0; m < spec_.count; ++m) {
    Member& mem = members_[static_cast<std::size_t>(m)];
    Family fam = spec_.family;
    if (fam == Family::Mixed) fam = m % 4 == 3 ? Family::BoundaryBump : Family::Trigonometric;

    if (fam == Family::BoundaryBump) {
      mem.offset = 0.1 * spec_.amplitude * unit(rng);
      const int bumps = 1 + static_cast<int>(unit(rng) * 3.0);
      const double extent = spec_.dim == 2 ? std::min(spec_.lx, spec_.ly) : spec_.lx;
      for (int b = 0; b < bumps; ++b) {
        Bump bump{};
        const int side = static_cast<int>(unit(rng) * (spec_.dim == 2 ? 4.0 : 2.0));
        const double s = unit(rng);
        switch (side) {
          case 0: bump.cx = 0.0, bump.cy = s * spec_.ly; break;
          case 1: bump.cx = spec_.lx, bump.cy = s * spec_.ly; break;
          case 2: bump.cx = s * spec_.lx, bump.cy = 0.0; break;
          default: bump.cx = s * spec_.lx, bump.cy = spec_.ly; break;
        }
        if (spec_.dim == 1) bump.cy = 0.0;
        bump.width = extent / (4.0 * K) * (1.0 + unit(rng));
        bump.height = spec_.amplitude * (0.5 + 0.5 * unit(rng));
        mem.bumps.push_back(bump);
      }
      continue;
    }

    const bool phased = fam == Family::Trigonometric;
    mem.offset = spec_.amplitude * unit(rng);
    for (int kx = 0; kx <= K; ++kx)
      for (int ky = 0; ky <= ky_max; ++ky) {
        if (kx == 0 && ky == 0) continue;
        Mode mode{kx, ky, 0.0, 0.0, 0.0};
        mode.coef = spec_.amplitude * (2.0 * unit(rng) - 1.0) / (1.0 + kx * kx + ky * ky);
        if (phased) {
          mode.phase_x = two_pi * unit(rng);
          mode.phase_y = two_pi * unit(rng);
        }
        mem.modes.push_back(mode);
      }
  }
}

double FieldEnsemble::value(std::size_t member, double x, double y) const {
  const Member& mem = members_.at(member);
  double s = mem.offset;
  const double pi = std::numbers::pi;
  for (const auto& m : mem.modes) {
    double term = m.coef * std::cos(pi * m.kx * x / spec_.lx + m.phase_x);
    if (spec_.dim == 2) term *= std::cos(pi * m.ky * y / spec_.ly + m.phase_y);
    s += term;
  }
  for (const auto& b : mem.bumps) {
    const double dx = x - b.cx;
    const double dy = spec_.dim == 2 ? y - b.cy : 0.0;
    s += b.height * std::exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width));
  }
  return s;
}

Field FieldEnsemble::sample(std::size_t member, const GridPtr& grid) const {
  const Member& mem = members_.at(member);
  const int nx = grid->nx();
  const int ny = grid->ny();
  const bool planar = spec_.dim == 2;
  if (planar != (grid->dim() == 2)) throw Error("ensemble and grid dimensions differ");
  Field f(grid, mem.offset);
  std::vector<double> ax(static_cast<std::size_t>(nx)), ay(static_cast<std::size_t>(ny), 1.0);
  // Every term is a product of one factor per axis.
  auto accumulate = [&](double weight) {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) f.at(i, j) += weight * ax[i] * ay[j];
  };
  const double pi = std::numbers::pi;
  for (const auto& m : mem.modes) {
    for (int i = 0; i < nx; ++i) ax[i] = std::cos(pi * m.kx * grid->x(i) / spec_.lx + m.phase_x);
    if (planar)
      for (int j = 0; j < ny; ++j) ay[j] = std::cos(pi * m.ky * grid->y(j) / spec_.ly + m.phase_y);
    accumulate(m.coef);
  }
  for (const auto& b : mem.bumps) {
    const double s = 2.0 * b.width * b.width;
    for (int i = 0; i < nx; ++i) ax[i] = std::exp(-(grid->x(i) - b.cx) * (grid->x(i) - b.cx) / s);
    if (planar)
      for (int j = 0; j < ny; ++j) ay[j] = std::exp(-(grid->y(j) - b.cy) * (grid->y(j) - b.cy) / s);
    accumulate(b.height);
  }
  return f;
}

GridPtr FieldEnsemble::grid(int cells) const {
  if (cells < 4 * spec_.max_wavenumber)
    throw Error("resolution " + std::to_string(cells) + " cannot resolve wavenumber " +
                std::to_string(spec_.max_wavenumber) + " (need cells >= 4 x max_wavenumber)");
  return spec_.dim == 2 ? grid::Grid::rectangle(spec_.lx, spec_.ly, cells, cells)
                        : grid::Grid::interval(spec_.lx, cells);
}

double ConstantFitReport::constant() const {
  double c = 0.0;
  for (const auto& f : fits) c = std::max(c, f.constant);
  return c;
}

double ConstantFitReport::secondary() const {
  double c = 0.0;
  for (const auto& f : fits) c = std::max(c, f.secondary);
  return c;
}

const ResolutionFit& ConstantFitReport::at(int cells) const {
  for (const auto& f : fits)
    if (f.cells == cells) return f;
  throw Error("report for " + lemma + " has no fit at " + std::to_string(cells) + " cells");
}

std::string ConstantFitReport::parameter_string() const {
  std::string out;
  for (const auto& [key, value] : parameters) {
    if (!out.empty()) out += ';';
    out += key + '=' + format_double(value);
  }
  return out;
}

ConstantFitReport check_gny(const FieldEnsemble& ensemble, const std::vector<int>& resolutions, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error("check_gny needs eta in (0, 1)");
  ConstantFitReport report;
  report.lemma = "gny";
  report.parameters = {{"eta", eta}};
  return run_fit(ensemble, resolutions, std::move(report));
}

std::vector<ConstantFitReport> gny_eta_sweep(const FieldEnsemble& ensemble, const std::vector<int>& resolutions) {
  std::vector<ConstantFitReport> out;
  for (double eta : kGnyEtas) out.push_back(check_gny(ensemble, resolutions, eta));
  return out;
}

ConstantFitReport check_boundary_trace(const FieldEnsemble& ensemble, const std::vector<int>& resolutions, double r,
                                       double p, double eps) {
  require_exponents(r, p);
  if (!(eps > 0.0)) throw Error("check_boundary_trace needs eps > 0");
  ConstantFitReport report;
  report.lemma = "boundary_trace";
  report.parameters = {{"r", r}, {"p", p}, {"eps", eps}};
  return run_fit(ensemble, resolutions, std::move(report));
}

ConstantFitReport check_boundary_reg(const FieldEnsemble& ensemble, const std::vector<int>& resolutions, double r,
                                     double p, double eta) {
  require_exponents(r, p);
  if (!(eta > 0.0 && eta < 0.5)) throw Error("check_boundary_reg needs eta in (0, 1/2)");
  ConstantFitReport report;
  report.lemma = "boundary_reg";
  report.parameters = {{"r", r}, {"p", p}, {"eta", eta}};
  return run_fit(ensemble, resolutions, std::move(report));
}

std::vector<ConstantFitReport> boundary_reg_eta_sweep(const FieldEnsemble& ensemble,
                                                      const std::vector<int>& resolutions, double r, double p) {
  std::vector<ConstantFitReport> out;
  for (double eta : kBoundaryRegEtas) out.push_back(check_boundary_reg(ensemble, resolutions, r, p, eta));
  return out;
}

ConstantFitReport check_unif_gn_2d(const FieldEnsemble& ensemble, const std::vector<int>& resolutions, double r,
                                   double p, double eta) {
  if (ensemble.spec().dim != 2) throw Error("check_unif_gn_2d is planar only");
  if (!(p > 1.0) || !(r >= 1.0 && r < p)) throw Error("check_unif_gn_2d needs p > 1 and 1 <= r < p");
  if (!(eta > 0.0)) throw Error("check_unif_gn_2d needs eta > 0");
  ConstantFitReport report;
  report.lemma = "unif_gn";
  report.parameters = {{"r", r}, {"p", p}, {"eta", eta}};
  return run_fit(ensemble, resolutions, std::move(report));
}

InequalityTerms evaluate_terms(const std::string& lemma, const std::vector<std::pair<std::string, double>>& parameters,
                               const Field& f) {
  return terms_for(lemma, parameters)(f);
}

std::size_t count_violations(const ConstantFitReport& report, const FieldEnsemble& ensemble) {
  const TermFn fn = terms_for(report);
  const double c = report.constant();
  const double d = report.secondary();
  std::size_t violations = 0;
  for (const auto& f : report.fits) {
    for (const auto& t : evaluate(ensemble, f.cells, fn)) {
      const double rhs = t.base + c * t.coef + d;
      // rounding slack of the division that produced c
      if (t.lhs > rhs + 1e-12 * (std::abs(t.lhs) + std::abs(rhs))) ++violations;
    }
  }
  return violations;
}

double check_convexity_sign(const Field& f) {
  f.require_finite("check_convexity_sign");
  const Field g = grid::cell_grad_sq(f);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& face : f.grid().boundary_faces()) {
    const std::size_t far = 2 * face.inner - face.cell;
    // outward derivative of the quadratic through the first three cell centers
    const double d = (2.0 * g[face.cell] - 3.0 * g[face.inner] + g[far]) / face.spacing;
    worst = std::max(worst, d);
  }
  return worst;
}

TrajectoryTraceCheck check_trajectory_trace(const Field& u, const Field& v, double p, double eps) {
  if (!u.grid().same_shape(v.grid())) throw Error("check_trajectory_trace: u and v live on different grids");
  if (!(eps > 0.0) || !(p > 1.0)) throw Error("check_trajectory_trace needs eps > 0 and p > 1");
  const Field gv = grid::cell_grad_sq(v);
  Field w(u.grid_ptr());
  kernels::CompensatedSum cubic, weighted;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double a = std::abs(u[k]);
    w[k] = std::pow(a, p) * gv[k];
    cubic.add(a * a * a);
    weighted.add(a * a * gv[k]);
  }
  const double vol = u.grid().cell_volume();
  const double bulk =
      (cubic.value() + weighted.value()) * vol + grid::grad_sq_integral(u) + grid::grad_sq_integral(gv);
  TrajectoryTraceCheck out;
  out.required = std::max(0.0, grid::boundary_integral_pow(w, 1.0) - eps * bulk);
  out.signal_energy = grid::grad_sq_integral(v);
  return out;
}

void write_report_csv(std::ostream& out, const std::vector<ConstantFitReport>& reports) {
  out << "lemma,parameters,cells,constant,secondary,attaining_index,seed,flagged\n";
  for (const auto& r : reports) {
    for (const auto& f : r.fits) {
      out << r.lemma << ',' << r.parameter_string() << ',' << f.cells << ',' << format_double(f.constant) << ','
          << format_double(f.secondary) << ',' << f.attaining_index << ',' << r.seed << ','
          << (r.flagged ? 1 : 0) << '\n';
    }
  }
}

}  // namespace ksnbc::ineq
