#include "ksnbc/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ksnbc/format.hpp"
#include "ksnbc/kernels.hpp"

namespace ksnbc::monitors {

namespace {

std::string extra_name(double r) { return "l" + format_double(r); }

double* field_of(MonitorRecord& rec, std::string_view name) {
  if (name == "t") return &rec.t;
  if (name == "mass") return &rec.mass;
  if (name == "l1") return &rec.l1;
  if (name == "l2") return &rec.l2;
  if (name == "l4") return &rec.l4;
  if (name == "llogl") return &rec.llogl;
  if (name == "gradv2") return &rec.gradv2;
  if (name == "gradv4") return &rec.gradv4;
  if (name == "phi") return &rec.phi;
  if (name == "psi") return &rec.psi;
  if (name == "sup_u") return &rec.sup_u;
  if (name == "boundary_influx") return &rec.boundary_influx;
  if (name == "dt") return &rec.dt;
  return nullptr;
}

}  // namespace

MonitorRecord sample(const stepper::SimState& state, double boundary_exponent, const std::vector<double>& extra_r) {
  const Field& u = state.u;
  u.require_finite("monitor sample (u)");
  const bool has_signal = state.v.size() == u.size();
  if (has_signal) state.v.require_finite("monitor sample (v)");
  const double volume = u.grid().cell_volume();

  MonitorRecord rec;
  rec.t = state.t;
  rec.dt = state.dt;
  rec.mass = grid::integrate(u);
  rec.l1 = grid::lp_norm(u, 1.0);
  rec.l2 = grid::lp_norm(u, 2.0);
  rec.l4 = grid::lp_norm(u, 4.0);
  for (double r : extra_r) rec.extra_norms.push_back(grid::lp_norm(u, r));

  kernels::CompensatedSum entropy, u_sq, grad4, cross;
  Field grad_sq = has_signal ? grid::cell_grad_sq(state.v) : Field(u.grid_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double x = u[k];
    entropy.add((x + 1.0) * std::log1p(x));
    u_sq.add(x * x);
    grad4.add(grad_sq[k] * grad_sq[k]);
    cross.add(x * grad_sq[k]);
  }
  rec.llogl = entropy.value() * volume;
  rec.gradv2 = has_signal ? grid::grad_sq_integral(state.v) : 0.0;
  rec.gradv4 = grad4.value() * volume;
  const double int_u_sq = u_sq.value() * volume;
  rec.phi = 0.5 * int_u_sq + 0.25 * rec.gradv4;
  rec.psi = int_u_sq + rec.gradv4 + cross.value() * volume / 3.0;
  rec.sup_u = u.max();
  rec.boundary_influx = grid::boundary_integral_pow(u, boundary_exponent);
  return rec;
}

MonitorRecord sample(const stepper::SimState& state, const stepper::Problem& problem, const std::vector<double>& extra_r) {
  const double exponent = std::holds_alternative<model::ModelParams>(problem)
                              ? std::get<model::ModelParams>(problem).p
                              : std::get<model::NbcParams>(problem).P;
  return sample(state, exponent, extra_r);
}

const std::vector<std::string>& MonitorSeries::fixed_columns() {
  static const std::vector<std::string> cols = {"t",   "mass", "l1",    "l2",    "l4",
                                                "llogl", "gradv2", "gradv4", "phi", "psi",
                                                "sup_u", "boundary_influx", "dt"};
  return cols;
}

void MonitorSeries::push(MonitorRecord record) {
  if (!records_.empty() && !(record.t > records_.back().t))
    throw Error("monitor sample times must be strictly increasing");
  if (record.extra_norms.size() != extra_r_.size()) throw Error("monitor record does not match configured norms");
  records_.push_back(std::move(record));
}

std::vector<std::string> MonitorSeries::columns() const {
  auto cols = fixed_columns();
  for (double r : extra_r_) cols.push_back(extra_name(r));
  return cols;
}

std::vector<double> MonitorSeries::column(std::string_view name) const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (std::size_t e = 0; e < extra_r_.size(); ++e) {
    if (name == extra_name(extra_r_[e])) {
      for (const auto& rec : records_) out.push_back(rec.extra_norms[e]);
      return out;
    }
  }
  MonitorRecord probe;
  if (!field_of(probe, name)) throw Error("unknown monitor column '" + std::string(name) + "'");
  for (auto rec : records_) out.push_back(*field_of(rec, name));
  return out;
}

void MonitorSeries::write_csv(std::ostream& out) const {
  const auto cols = columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (auto rec : records_) {
    bool first = true;
    for (const auto& name : fixed_columns()) {
      out << (first ? "" : ",") << format_double(*field_of(rec, name));
      first = false;
    }
    for (double x : rec.extra_norms) out << ',' << format_double(x);
    out << '\n';
  }
}

MonitorSeries MonitorSeries::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("series CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto& fixed = fixed_columns();
  for (const auto& name : fixed) {
    if (std::find(header.begin(), header.end(), name) == header.end())
      throw Error("series CSV is missing column '" + name + "'");
  }
  std::vector<double> extra_r;
  for (const auto& name : header) {
    MonitorRecord probe;
    if (field_of(probe, name)) continue;
    if (name.size() < 2 || name[0] != 'l') throw Error("series CSV has unknown column '" + name + "'");
    extra_r.push_back(parse_double(name.substr(1), "series CSV column '" + name + "'"));
  }
  MonitorSeries series(extra_r);
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    MonitorRecord rec;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= header.size()) throw Error("series CSV row has too many values");
      const double value = parse_double(cell, "series CSV line " + std::to_string(row));
      if (double* slot = field_of(rec, header[c])) {
        *slot = value;
      } else {
        rec.extra_norms.push_back(value);
      }
      ++c;
    }
    if (c != header.size()) throw Error("series CSV row has too few values");
    series.push(std::move(rec));
  }
  return series;
}

const char* to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Bounded: return "Bounded";
    case VerdictStatus::Growing: return "Growing";
    case VerdictStatus::BlownUp: return "BlownUp";
  }
  return "Unknown";
}

Verdict verdict(const MonitorSeries& series, std::string_view functional, bool blown_up, const VerdictOptions& options) {
  if (series.size() < options.min_samples)
    throw InsufficientSamplesError("verdict needs at least " + std::to_string(options.min_samples) + " samples, got " +
                                   std::to_string(series.size()));
  const auto t = series.times();
  const auto y = series.column(functional);

  Verdict out;
  out.sup = *std::max_element(y.begin(), y.end());

  const double t_end = t.back();
  const double t_start = t_end - options.window * (t_end - t.front());
  double st = 0.0, sy = 0.0, n = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_start) continue;
    st += t[k];
    sy += std::log(std::abs(y[k]) + options.eps0);
    n += 1.0;
  }
  if (n >= 2.0) {
    const double mt = st / n;
    const double my = sy / n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] < t_start) continue;
      const double dt = t[k] - mt;
      stt += dt * dt;
      sty += dt * (std::log(std::abs(y[k]) + options.eps0) - my);
    }
    out.slope = stt > 0.0 ? sty / stt : 0.0;
  }

  if (blown_up) {
    out.status = VerdictStatus::BlownUp;
  } else if (out.slope > options.slope_tol || !(out.sup < options.blowup_cap)) {
    out.status = VerdictStatus::Growing;
  } else {
    out.status = VerdictStatus::Bounded;
  }
  return out;
}

MoserLadder moser_ladder(const Field& u, double r0, int levels) {
  const int dim = u.grid().dim();
  if (!(r0 > 0.5 * dim)) throw Error("moser_ladder requires r0 > n/2");
  if (levels < 0 || levels > 8) throw Error("moser_ladder supports 0..8 levels");
  u.require_finite("moser_ladder");

  MoserLadder ladder;
  const double peak = std::max(std::abs(u.max()), std::abs(u.min()));
  const auto n = static_cast<double>(u.size());
  double r = r0;
  for (int k = 0; k <= levels; ++k, r *= 2.0) {
    ladder.exponents.push_back(r);
    if (peak == 0.0) {
      ladder.log_norms.push_back(-std::numeric_limits<double>::infinity());
      ladder.norms.push_back(0.0);
      continue;
    }
    // mean of (|u|/peak)^r lies in [1/N, 1], so its log is always representable.
    kernels::CompensatedSum acc;
    for (double x : u.values()) acc.add(std::pow(std::abs(x) / peak, r));
    const double log_norm = std::log(peak) + std::log(acc.value() / n) / r;
    if (log_norm > std::log(std::numeric_limits<double>::max())) throw OverflowError("moser ladder rung overflows");
    ladder.log_norms.push_back(log_norm);
    ladder.norms.push_back(std::exp(log_norm));
  }
  return ladder;
}

GronwallReport gronwall_report(const std::vector<double>& t, const std::vector<double>& y, double lambda,
                               double relative_tol) {
  if (!(lambda > 0.0)) throw Error("gronwall_report requires lambda > 0");
  if (t.size() != y.size()) throw Error("gronwall_report: time and value lengths differ");
  if (t.size() < 3) throw InsufficientSamplesError("gronwall_report needs at least 3 samples");

  const std::size_t n = t.size();
  GronwallReport report;
  report.lambda = lambda;
  report.forcing.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double slope;
    if (k == 0) {
      slope = (y[1] - y[0]) / (t[1] - t[0]);
    } else if (k + 1 == n) {
      slope = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
    } else {
      slope = (y[k + 1] - y[k - 1]) / (t[k + 1] - t[k - 1]);
    }
    report.forcing[k] = slope + lambda * y[k];
  }
  report.sup_forcing = *std::max_element(report.forcing.begin(), report.forcing.end());

  double scale = 0.0;
  for (double x : y) scale = std::max(scale, std::abs(x));
  const double tol = relative_tol * scale;
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double decay = std::exp(-lambda * (t[k] - t[0]));
    const double envelope = decay * y[0] + report.sup_forcing / lambda * (1.0 - decay);
    const double excess = y[k] - envelope;
    report.max_excess = std::max(report.max_excess, excess);
    if (excess > tol) ++report.violations;
  }
  return report;
}

GronwallReport gronwall_report(const MonitorSeries& series, std::string_view functional, double lambda,
                               double relative_tol) {
  return gronwall_report(series.times(), series.column(functional), lambda, relative_tol);
}

}  // namespace ksnbc::monitors
