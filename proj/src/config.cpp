#include "ksnbc/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace ksnbc::harness {

namespace fs = std::filesystem;
using nlohmann::json;

ParseError::ParseError(std::string key, long line, const std::string& what)
    : Error(what), key_(std::move(key)), line_(line) {}

namespace {

long line_of(const toml::node& node) { return static_cast<long>(node.source().begin.line); }

// Typed access to one TOML table with key bookkeeping for strict mode.
class TableReader {
 public:
  TableReader(const toml::table* table, std::string prefix, std::string source, bool strict)
      : table_(table), prefix_(std::move(prefix)), source_(std::move(source)), strict_(strict) {}

  [[nodiscard]] bool present() const { return table_ != nullptr; }
  [[nodiscard]] bool has(const std::string& key) const { return table_ && table_->contains(key); }

  std::optional<double> number(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->as_floating_point()) return v->get();
    if (auto v = n->as_integer()) return static_cast<double>(v->get());
    fail(key, *n, "must be a number");
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->as_integer()) return v->get();
    fail(key, *n, "must be an integer");
  }

  std::optional<bool> boolean(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->as_boolean()) return v->get();
    fail(key, *n, "must be true or false");
  }

  std::optional<std::string> string(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->as_string()) return v->get();
    fail(key, *n, "must be a string");
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    std::vector<double> out;
    if (auto v = n->as_floating_point()) return std::vector<double>{v->get()};
    if (auto v = n->as_integer()) return std::vector<double>{static_cast<double>(v->get())};
    const auto* arr = n->as_array();
    if (!arr) fail(key, *n, "must be a number or an array of numbers");
    for (const auto& e : *arr) {
      if (auto f = e.as_floating_point()) out.push_back(f->get());
      else if (auto i = e.as_integer()) out.push_back(static_cast<double>(i->get()));
      else fail(key, e, "must contain only numbers");
    }
    return out;
  }

  std::optional<std::vector<std::int64_t>> integers(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->as_integer()) return std::vector<std::int64_t>{v->get()};
    const auto* arr = n->as_array();
    if (!arr) fail(key, *n, "must be an integer or an array of integers");
    std::vector<std::int64_t> out;
    for (const auto& e : *arr) {
      if (auto i = e.as_integer()) out.push_back(i->get());
      else fail(key, e, "must contain only integers");
    }
    return out;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const auto* arr = n->as_array();
    if (!arr) fail(key, *n, "must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *arr) {
      if (auto s = e.as_string()) out.push_back(s->get());
      else fail(key, e, "must contain only strings");
    }
    return out;
  }

  TableReader table(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return {nullptr, qualified(key), source_, strict_};
    const auto* t = n->as_table();
    if (!t) fail(key, *n, "must be a table");
    return {t, qualified(key), source_, strict_};
  }

  /// Value-range error for a key that was read successfully.
  [[noreturn]] void reject(const std::string& key, const std::string& what) const {
    const toml::node* n = table_ ? table_->get(key) : nullptr;
    const long line = n ? line_of(*n) : 0;
    throw ParseError(qualified(key), line, where(line) + "'" + qualified(key) + "' " + what);
  }

  [[noreturn]] void missing(const std::string& key) const {
    const long line = table_ ? line_of(*table_) : 0;
    throw ParseError(qualified(key), line, source_ + ": missing required key '" + qualified(key) + "'");
  }

  /// Unknown keys: an error in strict mode, a warning otherwise.
  void finish() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      const std::string key(k.str());
      if (seen_.count(key)) continue;
      const long line = line_of(v);
      const std::string msg = where(line) + "unknown key '" + qualified(key) + "'";
      if (strict_) throw ParseError(qualified(key), line, msg);
      std::cerr << "warning: " << msg << " (ignored)\n";
    }
  }

  [[nodiscard]] const std::string& source() const { return source_; }

 private:
  const toml::node* node(const std::string& key) {
    seen_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  [[nodiscard]] std::string qualified(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  [[nodiscard]] std::string where(long line) const {
    return source_ + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": ";
  }

  [[noreturn]] void fail(const std::string& key, const toml::node& n, const std::string& what) const {
    const long line = line_of(n);
    throw ParseError(qualified(key), line, where(line) + "'" + qualified(key) + "' " + what);
  }

  const toml::table* table_;
  std::string prefix_;
  std::string source_;
  bool strict_;
  std::set<std::string> seen_;
};

double positive(TableReader& t, const std::string& key, double fallback) {
  const double v = t.number(key).value_or(fallback);
  if (!(v > 0.0) || !std::isfinite(v)) t.reject(key, "must be positive and finite");
  return v;
}

int positive_int(TableReader& t, const std::string& key, int fallback) {
  const auto v = t.integer(key).value_or(fallback);
  if (v < 1 || v > 1'000'000'000) t.reject(key, "must be a positive integer");
  return static_cast<int>(v);
}

model::RawParams read_model(TableReader& t) {
  model::RawParams raw;
  raw.chi = t.number("chi");
  raw.a = t.number("a");
  raw.mu = t.number("mu");
  raw.alpha = t.number("alpha");
  raw.beta = t.number("beta");
  raw.p = t.number("p");
  if (auto v = t.integer("tau")) raw.tau = static_cast<int>(*v);
  if (auto v = t.integer("dim")) raw.dim = static_cast<int>(*v);
  raw.exploration = t.boolean("exploration").value_or(false);
  t.finish();
  return raw;
}

GridSpec read_grid(TableReader& t, std::optional<int> model_dim) {
  GridSpec g;
  const auto dim = t.integer("dim");
  if (model_dim) {
    g.dim = *model_dim;
    if (dim && *dim != *model_dim) t.reject("dim", "disagrees with model.dim");
  } else {
    g.dim = static_cast<int>(dim.value_or(1));
  }
  if (g.dim != 1 && g.dim != 2) {
    if (dim) t.reject("dim", "must be 1 or 2 (simulations run on intervals and rectangles)");
    throw ParseError("model.dim", 0,
                     t.source() + ": simulations run in 1 or 2 dimensions, model.dim = " + std::to_string(g.dim));
  }
  const int cells = positive_int(t, "cells", 64);
  g.nx = t.has("nx") ? positive_int(t, "nx", cells) : cells;
  g.ny = g.dim == 2 ? (t.has("ny") ? positive_int(t, "ny", cells) : cells) : 1;
  if (g.dim == 1 && t.has("ny")) t.reject("ny", "is not used on an interval");
  g.lx = positive(t, "lx", 1.0);
  g.ly = g.dim == 2 ? positive(t, "ly", 1.0) : 1.0;
  if (g.nx < grid::Grid::kMinCells || (g.dim == 2 && g.ny < grid::Grid::kMinCells))
    t.reject(g.nx < grid::Grid::kMinCells ? (t.has("nx") ? "nx" : "cells") : (t.has("ny") ? "ny" : "cells"),
             "must be at least 4");
  t.finish();
  return g;
}

InitialSpec read_initial(TableReader& t, const GridSpec& g, const fs::path& base_dir, InitialSpec fallback) {
  if (!t.present()) return fallback;
  InitialSpec s;
  const std::string kind = t.string("kind").value_or("");
  if (kind == "constant") {
    s.kind = InitialSpec::Kind::Constant;
    s.value = t.number("value").value_or(0.0);
  } else if (kind == "gaussian-bump") {
    s.kind = InitialSpec::Kind::GaussianBump;
    const auto c = t.numbers("center").value_or(std::vector<double>{0.5 * g.lx, 0.5 * g.ly});
    if (c.size() != static_cast<std::size_t>(g.dim)) t.reject("center", "needs one coordinate per dimension");
    s.center = {c[0], g.dim == 2 ? c[1] : 0.0};
    s.width = positive(t, "width", 0.1);
    s.amplitude = t.number("amplitude").value_or(1.0);
    s.base = t.number("base").value_or(0.0);
  } else if (kind == "cosine-mode") {
    s.kind = InitialSpec::Kind::CosineMode;
    const auto k = t.integers("k").value_or(std::vector<std::int64_t>{1, 0});
    if (k.empty() || k.size() > 2) t.reject("k", "needs one or two wavenumbers");
    s.k = {static_cast<int>(k[0]), k.size() > 1 ? static_cast<int>(k[1]) : 0};
    s.amplitude = t.number("amplitude").value_or(1.0);
    s.base = t.number("base").value_or(std::abs(s.amplitude));
  } else if (kind == "file") {
    s.kind = InitialSpec::Kind::File;
    const auto path = t.string("path");
    if (!path) t.missing("path");
    fs::path p(*path);
    if (p.is_relative()) p = base_dir / p;
    if (!fs::exists(p)) t.reject("path", "names a file that does not exist: " + p.string());
    s.path = p.string();
  } else if (kind.empty()) {
    t.missing("kind");
  } else {
    t.reject("kind", "must be one of constant, gaussian-bump, cosine-mode, file (got '" + kind + "')");
  }
  t.finish();
  return s;
}

void read_time(TableReader& t, RunConfig& c) {
  const auto horizon = t.number("T");
  if (!horizon) t.missing("T");
  if (!(*horizon >= 0.0) || !std::isfinite(*horizon)) t.reject("T", "must be finite and >= 0");
  c.horizon = *horizon;
  c.stepper.dt_max = positive(t, "dt_max", c.stepper.dt_max);
  c.stepper.dt_min = positive(t, "dt_min", c.stepper.dt_min);
  if (c.stepper.dt_min > c.stepper.dt_max) t.reject("dt_min", "exceeds dt_max");
  if (t.has("dt")) c.stepper.fixed_dt = positive(t, "dt", 1.0);
  c.stepper.safety = positive(t, "safety", c.stepper.safety);
  if (c.stepper.safety > 1.0) t.reject("safety", "must be in (0, 1]");
  if (auto v = t.integer("max_steps")) {
    if (*v < 1) t.reject("max_steps", "must be >= 1");
    c.stepper.max_steps = static_cast<long>(*v);
  }
  t.finish();
}

void read_monitor(TableReader& t, RunConfig& c) {
  c.monitor.cadence = positive_int(t, "cadence", c.monitor.cadence);
  if (auto r = t.numbers("extra_r")) {
    for (double x : *r)
      if (!(x >= 1.0)) t.reject("extra_r", "entries must be >= 1");
    c.monitor.extra_r = *r;
  }
  c.stepper.blowup_cap = positive(t, "blowup_cap", c.stepper.blowup_cap);
  c.stepper.negativity_tol = positive(t, "negativity_tol", c.stepper.negativity_tol);
  c.stepper.pinned_steps = positive_int(t, "pinned_steps", c.stepper.pinned_steps);
  t.finish();
}

void read_solver(TableReader& t, RunConfig& c) {
  auto& s = c.stepper.solver;
  if (auto b = t.string("backend")) {
    if (*b == "auto") s.backend = operators::SolverBackend::Auto;
    else if (*b == "cg") s.backend = operators::SolverBackend::ConjugateGradient;
    else if (*b == "dct") s.backend = operators::SolverBackend::Spectral;
    else t.reject("backend", "must be auto, cg or dct");
  }
  s.tolerance = positive(t, "tolerance", s.tolerance);
  s.max_iterations = positive_int(t, "max_iterations", s.max_iterations);
  t.finish();
}

std::string read_output(TableReader& t) {
  std::string dir = t.string("dir").value_or("");
  t.finish();
  return dir;
}

std::uint64_t read_seed(TableReader& root, std::uint64_t fallback) {
  const auto seed = root.integer("seed");
  if (!seed) return fallback;
  if (*seed < 0) root.reject("seed", "must be >= 0");
  return static_cast<std::uint64_t>(*seed);
}

RunConfig read_run(TableReader& root, const fs::path& base_dir, bool sweep_axes) {
  RunConfig c;
  auto model_t = root.table("model");
  auto nbc_t = root.table("nbc");
  if (model_t.present() == nbc_t.present())
    throw ParseError("model", 0, root.source() + ": exactly one of [model] or [nbc] is required");

  std::optional<int> model_dim;
  if (model_t.present()) {
    c.mode = RunConfig::Mode::KellerSegel;
    auto raw = read_model(model_t);
    const bool exploration = raw.exploration;
    if (sweep_axes) {
      // p and μ come from the sweep axes and are validated per cell.
      raw.p = 1.25;
      raw.mu = 1.0;
      raw.exploration = true;
    }
    c.model = model::validate(raw);
    c.model.exploration = exploration;
    model_dim = c.model.dim;
  } else {
    c.mode = RunConfig::Mode::Nbc;
    model::RawNbcParams raw;
    raw.mu = nbc_t.number("mu");
    raw.Q = nbc_t.number("Q");
    raw.P = nbc_t.number("P");
    nbc_t.finish();
    c.nbc = model::validate(raw);
  }

  auto grid_t = root.table("grid");
  c.grid = read_grid(grid_t, model_dim);

  auto boundary_t = root.table("boundary");
  const std::string flux = boundary_t.string("flux").value_or("nonlinear");
  if (flux == "nonlinear") c.stepper.boundary_flux = true;
  else if (flux == "homogeneous") c.stepper.boundary_flux = false;
  else boundary_t.reject("flux", "must be 'nonlinear' or 'homogeneous'");
  boundary_t.finish();

  auto initial_t = root.table("initial");
  InitialSpec u_default;
  u_default.value = 1.0;
  auto u_t = initial_t.table("u");
  auto v_t = initial_t.table("v");
  c.u0 = read_initial(u_t, c.grid, base_dir, u_default);
  c.v0 = read_initial(v_t, c.grid, base_dir, InitialSpec{});
  initial_t.finish();
  if (c.mode == RunConfig::Mode::Nbc && v_t.present())
    throw ParseError("initial.v", 0, root.source() + ": the scalar problem has no signal; remove [initial.v]");

  auto time_t = root.table("time");
  if (!time_t.present()) root.missing("time.T");
  read_time(time_t, c);
  auto monitor_t = root.table("monitor");
  read_monitor(monitor_t, c);
  auto solver_t = root.table("solver");
  read_solver(solver_t, c);
  auto output_t = root.table("output");
  c.output_dir = read_output(output_t);
  c.seed = read_seed(root, 0);
  return c;
}

SweepConfig read_sweep(TableReader& root, const fs::path& base_dir) {
  SweepConfig s;
  s.base = read_run(root, base_dir, true);
  if (s.base.mode != RunConfig::Mode::KellerSegel)
    throw ParseError("sweep", 0, root.source() + ": sweeps explore the chemotaxis system and need [model]");
  auto t = root.table("sweep");
  auto axis = [&](const char* key, bool required) {
    auto v = t.numbers(key);
    if (!v) {
      if (required) t.missing(key);
      return std::vector<double>{};
    }
    if (v->empty()) t.reject(key, "must not be empty");
    return *v;
  };
  s.p = axis("p", true);
  s.mu = axis("mu", true);
  s.chi = axis("chi", false);
  s.horizon = t.number("T").value_or(s.base.horizon);
  if (!(s.horizon >= 0.0) || !std::isfinite(s.horizon)) t.reject("T", "must be finite and >= 0");
  s.workers = positive_int(t, "workers", 1);
  s.max_cells = positive_int(t, "max_cells", 400);
  if (s.cell_count() > static_cast<std::size_t>(s.max_cells))
    t.reject("p", "and mu span " + std::to_string(s.cell_count()) + " cells, above max_cells = " +
                      std::to_string(s.max_cells));
  t.finish();
  return s;
}

IneqConfig read_ineq(TableReader& root) {
  IneqConfig c;
  auto t = root.table("ineq");
  auto& e = c.ensemble;
  e.seed = read_seed(root, 1);
  if (auto s = t.integer("seed")) {
    if (*s < 0) t.reject("seed", "must be >= 0");
    e.seed = static_cast<std::uint64_t>(*s);
  }
  e.count = positive_int(t, "count", e.count);
  if (auto f = t.string("family")) {
    try {
      e.family = ineq::family_from_string(*f);
    } catch (const Error& err) {
      t.reject("family", "must be trig, cosine, boundary-bump or mixed");
    }
  }
  e.dim = static_cast<int>(t.integer("dim").value_or(2));
  if (e.dim != 1 && e.dim != 2) t.reject("dim", "must be 1 or 2");
  e.lx = positive(t, "lx", 1.0);
  e.ly = positive(t, "ly", 1.0);
  e.max_wavenumber = positive_int(t, "max_wavenumber", e.max_wavenumber);
  e.amplitude = positive(t, "amplitude", e.amplitude);
  if (auto r = t.integers("resolutions")) {
    c.resolutions.clear();
    for (auto n : *r) {
      if (n < 4 * e.max_wavenumber) t.reject("resolutions", "entries must be >= 4 x max_wavenumber");
      c.resolutions.push_back(static_cast<int>(n));
    }
    if (c.resolutions.empty()) t.reject("resolutions", "must not be empty");
  }
  if (auto l = t.strings("lemmas")) {
    static const std::set<std::string> known = {"gny", "boundary_trace", "boundary_reg", "unif_gn", "convexity"};
    for (const auto& name : *l)
      if (!known.count(name))
        t.reject("lemmas", "has unknown entry '" + name +
                               "' (expected gny, boundary_trace, boundary_reg, unif_gn, convexity)");
    c.lemmas = *l;
  }
  c.r = positive(t, "r", c.r);
  c.p = positive(t, "p", c.p);
  c.eps = positive(t, "eps", c.eps);
  c.gn_r = positive(t, "gn_r", c.gn_r);
  c.gn_p = positive(t, "gn_p", c.gn_p);
  c.gn_eta = positive(t, "gn_eta", c.gn_eta);
  if (c.r < 0.5) t.reject("r", "must be >= 1/2");
  if (!(c.p > 1.0 && c.p < 1.5)) t.reject("p", "must lie in (1, 3/2)");
  if (!(c.gn_r >= 1.0 && c.gn_r < c.gn_p)) t.reject("gn_r", "must satisfy 1 <= gn_r < gn_p");
  t.finish();
  auto output_t = root.table("output");
  c.output_dir = read_output(output_t);
  return c;
}

json initial_json(const InitialSpec& s, int dim) {
  json j{{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case InitialSpec::Kind::Constant: j["value"] = s.value; break;
    case InitialSpec::Kind::GaussianBump:
      j["center"] = dim == 2 ? json::array({s.center[0], s.center[1]}) : json::array({s.center[0]});
      j["width"] = s.width;
      j["amplitude"] = s.amplitude;
      j["base"] = s.base;
      break;
    case InitialSpec::Kind::CosineMode:
      j["k"] = dim == 2 ? json::array({s.k[0], s.k[1]}) : json::array({s.k[0]});
      j["amplitude"] = s.amplitude;
      j["base"] = s.base;
      break;
    case InitialSpec::Kind::File: j["path"] = s.path; break;
  }
  return j;
}

}  // namespace

grid::GridPtr GridSpec::build() const {
  return dim == 2 ? grid::Grid::rectangle(lx, ly, nx, ny) : grid::Grid::interval(lx, nx);
}

const char* to_string(InitialSpec::Kind kind) {
  switch (kind) {
    case InitialSpec::Kind::Constant: return "constant";
    case InitialSpec::Kind::GaussianBump: return "gaussian-bump";
    case InitialSpec::Kind::CosineMode: return "cosine-mode";
    case InitialSpec::Kind::File: return "file";
  }
  return "unknown";
}

grid::Field InitialSpec::build(const grid::GridPtr& g, const std::string& name) const {
  const double pi = std::numbers::pi;
  grid::Field f;
  switch (kind) {
    case Kind::Constant: f = grid::Field(g, value); break;
    case Kind::GaussianBump:
      f = grid::Field::sample(g, [&](double x, double y) {
        const double dx = x - center[0];
        const double dy = g->dim() == 2 ? y - center[1] : 0.0;
        return base + amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
      });
      break;
    case Kind::CosineMode:
      f = grid::Field::sample(g, [&](double x, double y) {
        double c = std::cos(pi * k[0] * x / g->lx());
        if (g->dim() == 2) c *= std::cos(pi * k[1] * y / g->ly());
        return base + amplitude * c;
      });
      break;
    case Kind::File: f = grid::read_csv(path, g); break;
  }
  if (!f.all_finite()) throw Error("initial " + name + " has non-finite values");
  if (f.min() < 0.0) throw Error("initial " + name + " must be nonnegative (min " + std::to_string(f.min()) + ")");
  return f;
}

stepper::Problem RunConfig::problem() const {
  if (mode == Mode::Nbc) return nbc;
  return model;
}

std::size_t SweepConfig::cell_count() const { return p.size() * mu.size() * std::max<std::size_t>(1, chi.size()); }

Config parse_config(const std::string& text, const std::string& source_name, const LoadOptions& options) {
  toml::table doc;
  try {
    doc = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    const long line = static_cast<long>(e.source().begin.line);
    throw ParseError("", line, source_name + ":" + std::to_string(line) + ": " + std::string(e.description()));
  }
  const fs::path base_dir = fs::path(source_name).parent_path();
  TableReader root(&doc, "", source_name, options.strict);
  Config out;
  if (doc.contains("ineq")) {
    out = read_ineq(root);
  } else if (doc.contains("sweep")) {
    out = read_sweep(root, base_dir);
  } else {
    out = read_run(root, base_dir, false);
  }
  root.finish();
  return out;
}

Config load_config(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path, options);
}

json to_json(const RunConfig& c) {
  json j;
  if (c.mode == RunConfig::Mode::KellerSegel) {
    const auto& m = c.model;
    j["model"] = {{"chi", m.chi}, {"a", m.a},     {"mu", m.mu},   {"alpha", m.alpha},           {"beta", m.beta},
                  {"tau", m.tau}, {"p", m.p},     {"dim", m.dim}, {"exploration", m.exploration}};
  } else {
    j["nbc"] = {{"mu", c.nbc.mu}, {"Q", c.nbc.Q}, {"P", c.nbc.P}};
  }
  j["grid"] = {{"dim", c.grid.dim}, {"nx", c.grid.nx}, {"ny", c.grid.ny}, {"lx", c.grid.lx}, {"ly", c.grid.ly}};
  j["boundary"] = {{"flux", c.stepper.boundary_flux ? "nonlinear" : "homogeneous"}};
  j["initial"]["u"] = initial_json(c.u0, c.grid.dim);
  if (c.mode == RunConfig::Mode::KellerSegel) j["initial"]["v"] = initial_json(c.v0, c.grid.dim);
  j["time"] = {{"T", c.horizon},
               {"dt_max", c.stepper.dt_max},
               {"dt_min", c.stepper.dt_min},
               {"safety", c.stepper.safety},
               {"max_steps", c.stepper.max_steps}};
  if (c.stepper.fixed_dt) j["time"]["dt"] = *c.stepper.fixed_dt;
  j["monitor"] = {{"cadence", c.monitor.cadence},
                  {"extra_r", c.monitor.extra_r},
                  {"blowup_cap", c.stepper.blowup_cap},
                  {"negativity_tol", c.stepper.negativity_tol},
                  {"pinned_steps", c.stepper.pinned_steps}};
  j["solver"] = {{"backend", operators::to_string(c.stepper.solver.backend)},
                 {"tolerance", c.stepper.solver.tolerance},
                 {"max_iterations", c.stepper.solver.max_iterations}};
  j["output"] = {{"dir", c.output_dir}};
  j["seed"] = c.seed;
  return j;
}

json to_json(const SweepConfig& c) {
  json j = to_json(c.base);
  j["model"].erase("p");
  j["model"].erase("mu");
  j["sweep"] = {{"p", c.p}, {"mu", c.mu}, {"T", c.horizon}, {"workers", c.workers}, {"max_cells", c.max_cells}};
  if (!c.chi.empty()) j["sweep"]["chi"] = c.chi;
  return j;
}

json to_json(const IneqConfig& c) {
  const auto& e = c.ensemble;
  json j;
  j["ineq"] = {{"seed", e.seed},
               {"count", e.count},
               {"family", ineq::to_string(e.family)},
               {"dim", e.dim},
               {"lx", e.lx},
               {"ly", e.ly},
               {"max_wavenumber", e.max_wavenumber},
               {"amplitude", e.amplitude},
               {"resolutions", c.resolutions},
               {"lemmas", c.lemmas},
               {"r", c.r},
               {"p", c.p},
               {"eps", c.eps},
               {"gn_r", c.gn_r},
               {"gn_p", c.gn_p},
               {"gn_eta", c.gn_eta}};
  j["output"] = {{"dir", c.output_dir}};
  return j;
}

const char* config_schema() {
  return R"(Configuration schema (TOML, unknown keys rejected unless --no-strict)

  seed = <u64>                        optional, recorded in the manifest

  [model]              chemotaxis system (run, sweep)
    chi, a, mu, alpha, beta = <float> a, alpha, beta > 0; mu >= 0
    tau = 0 | 1                       0 = parabolic-elliptic, 1 = parabolic-parabolic
    p = <float>                       boundary exponent, 1 < p < 1.5
    dim = 1 | 2
    exploration = <bool>              admits p >= 1.5 and mu = 0 (default false)
  [nbc]                scalar problem U_t = dU - mu U^Q, dU/dn = U^P (nbc)
    mu, Q, P = <float>                mu > 0, Q > 1, P > 1
  [grid]
    cells = <int>                     per axis (default 64), or nx / ny
    lx, ly = <float>                  extents (default 1)
    dim = 1 | 2                       [nbc] only (default 1)
  [boundary]
    flux = "nonlinear" | "homogeneous"  du/dn = u^p or 0 (default nonlinear)
  [initial.u], [initial.v]
    kind = "constant"       value
    kind = "gaussian-bump"  center = [x, y], width, amplitude, base
    kind = "cosine-mode"    k = [kx, ky], amplitude, base (default |amplitude|)
    kind = "file"           path (snapshot CSV, relative to the config file)
    defaults: u constant 1, v constant 0
  [time]
    T = <float>                       required horizon
    dt_max = 1e-2, dt_min = 1e-12, safety = 0.8, dt = <fixed step>, max_steps
  [monitor]
    cadence = 10, extra_r = [<float>...], blowup_cap = 1e6,
    negativity_tol = 1e-8, pinned_steps = 100
  [solver]
    backend = "auto" | "cg" | "dct", tolerance = 1e-10, max_iterations = 10000
  [output]
    dir = <path>                      overridden by KSNBC_OUT, then by --out
  [sweep]              (p, mu) grid over the [model] base
    p = [<float>...], mu = [<float>...], chi = [<float>...] (optional)
    T = <float> (default time.T), workers = 1, max_cells = 400
  [ineq]               inequality lab campaign
    seed = 1, count = 200, family = "mixed" | "trig" | "cosine" | "boundary-bump",
    dim = 2, lx = 1, ly = 1, max_wavenumber = 4, amplitude = 1,
    resolutions = [64, 128],
    lemmas = ["gny", "boundary_trace", "boundary_reg", "unif_gn", "convexity"],
    r = 1, p = 1.25, eps = 0.5, gn_r = 1, gn_p = 2, gn_eta = 0.5
)";
}

}  // namespace ksnbc::harness
