#include <omp.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "ksnbc/format.hpp"
#include "ksnbc/harness.hpp"
#include "ksnbc/manifest.hpp"

#ifndef KSNBC_VERSION
#define KSNBC_VERSION "unknown"
#endif

namespace ksnbc::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kSweepFunctionals = {"sup_u", "llogl", "phi"};

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

json outcome_json(const stepper::RunOutcome& o) {
  return {{"status", stepper::to_string(o.status)}, {"t", o.t},        {"value", o.value},
          {"steps", o.steps},                      {"wall_time", o.wall_time}, {"message", o.message}};
}

json verdicts_json(const std::vector<FunctionalVerdict>& vs) {
  json j = json::object();
  for (const auto& v : vs) {
    json e{{"status", v.status()}};
    if (v.verdict) {
      e["sup"] = v.verdict->sup;
      e["slope"] = v.verdict->slope;
    }
    if (!v.note.empty()) e["note"] = v.note;
    j[v.functional] = e;
  }
  return j;
}

json classification_json(const model::RegimeClassification& c) {
  json j{{"verdict", model::to_string(c.verdict)}, {"citation", model::to_string(c.citation)}, {"note", c.note}};
  if (c.thresholds.mu_critical) j["mu_critical"] = *c.thresholds.mu_critical;
  if (c.thresholds.mu0) j["mu0"] = *c.thresholds.mu0;
  if (c.thresholds.p_limit) j["p_limit"] = *c.thresholds.p_limit;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write to " + path.string() + " failed");
}

}  // namespace

int exit_code(stepper::RunStatus status) {
  switch (status) {
    case stepper::RunStatus::Completed: return kExitOk;
    case stepper::RunStatus::BlowUp: return kExitBlowUp;
    default: return kExitError;
  }
}

std::string FunctionalVerdict::status() const { return verdict ? monitors::to_string(verdict->status) : note; }

std::vector<FunctionalVerdict> verdicts(const monitors::MonitorSeries& series,
                                        const std::vector<std::string>& functionals, bool blown_up,
                                        const monitors::VerdictOptions& options) {
  std::vector<FunctionalVerdict> out;
  for (const auto& name : functionals) {
    FunctionalVerdict v{name, std::nullopt, ""};
    try {
      v.verdict = monitors::verdict(series, name, blown_up, options);
    } catch (const monitors::InsufficientSamplesError&) {
      v.note = "insufficient-samples";
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::string> judged_functionals(const RunConfig& config) {
  if (config.mode == RunConfig::Mode::Nbc) return {"sup_u", "l2"};
  return {"sup_u", "l2", "llogl", "gradv2", "phi", "psi"};
}

double compatibility_residual(const grid::Field& u0, double exponent) {
  double worst = 0.0;
  for (const auto& face : u0.grid().boundary_faces()) {
    const double normal = (u0[face.cell] - u0[face.inner]) / face.spacing;
    const double data = exponent > 0.0 ? std::pow(std::abs(grid::face_trace(u0, face)), exponent) : 0.0;
    worst = std::max(worst, std::abs(normal - data));
  }
  return worst;
}

RunReport execute_run(const RunConfig& config, const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir / "snapshots");

  const auto g = config.grid.build();
  const grid::Field u0 = config.u0.build(g, "u");
  const bool signal = config.mode == RunConfig::Mode::KellerSegel;
  const grid::Field v0 = signal && config.model.tau == 1 ? config.v0.build(g, "v") : grid::Field(g);
  const double exponent = !config.stepper.boundary_flux ? 0.0
                          : signal                      ? config.model.p
                                                        : config.nbc.P;

  RunReport rep;
  rep.dir = out_dir;
  rep.compatibility_residual = compatibility_residual(u0, exponent);
  const std::string started = utc_timestamp();
  rep.result = stepper::run(config.problem(), g, u0, v0, config.horizon, config.monitor, config.stepper);
  const std::string finished = utc_timestamp();
  const bool blown_up = rep.result.outcome.status == stepper::RunStatus::BlowUp;
  rep.verdicts = verdicts(rep.result.series, judged_functionals(config), blown_up);

  std::vector<std::string> files{"series.csv"};
  {
    std::ostringstream csv;
    rep.result.series.write_csv(csv);
    write_text(dir / "series.csv", csv.str());
  }
  json snaps = json::array();
  for (const auto& s : rep.result.snapshots) {
    const std::string u_name = "snapshots/u_" + s.label + ".csv";
    grid::write_csv((dir / u_name).string(), s.u);
    files.push_back(u_name);
    json entry{{"label", s.label}, {"t", s.t}, {"u", u_name}};
    if (signal) {
      const std::string v_name = "snapshots/v_" + s.label + ".csv";
      grid::write_csv((dir / v_name).string(), s.v);
      files.push_back(v_name);
      entry["v"] = v_name;
    }
    snaps.push_back(entry);
  }

  json body;
  body["tool"] = "ksnbc";
  body["version"] = KSNBC_VERSION;
  body["command"] = signal ? "run" : "nbc";
  body["config"] = to_json(config);
  body["started"] = started;
  body["finished"] = finished;
  body["outcome"] = outcome_json(rep.result.outcome);
  body["verdicts"] = verdicts_json(rep.verdicts);
  if (signal) body["classification"] = classification_json(model::classify_regime(config.model));
  body["compatibility_residual"] = rep.compatibility_residual;
  body["snapshots"] = snaps;
  write_manifest(out_dir, body, files);
  return rep;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {
      "p",       "mu",         "chi",          "status",       "t_end",     "steps",    "verdict_sup_u", "verdict_llogl",
      "verdict_phi", "sup_u", "sup_llogl", "sup_phi", "wall_time", "classification", "citation", "message"};
  return cols;
}

std::vector<SweepRow> execute_sweep(const SweepConfig& config, const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const std::vector<double> chis = config.chi.empty() ? std::vector<double>{config.base.model.chi} : config.chi;

  std::vector<SweepRow> rows;
  for (double p : config.p)
    for (double mu : config.mu)
      for (double chi : chis) {
        SweepRow r;
        r.p = p;
        r.mu = mu;
        r.chi = chi;
        rows.push_back(r);
      }

  auto cell_name = [](std::size_t k) {
    std::ostringstream s;
    s << "cell_" << std::setw(3) << std::setfill('0') << k;
    return s.str();
  };

  auto run_cell = [&](std::size_t k) {
    SweepRow& row = rows[k];
    const auto wall_start = std::chrono::steady_clock::now();
    RunConfig cell = config.base;
    cell.horizon = config.horizon;
    model::RawParams raw;
    raw.chi = row.chi;
    raw.a = cell.model.a;
    raw.mu = row.mu;
    raw.alpha = cell.model.alpha;
    raw.beta = cell.model.beta;
    raw.p = row.p;
    raw.tau = cell.model.tau;
    raw.dim = cell.model.dim;
    raw.exploration = cell.model.exploration;
    try {
      cell.model = model::validate(raw);
      const auto cls = model::classify_regime(cell.model);
      row.classification = model::to_string(cls.verdict);
      row.citation = model::to_string(cls.citation);
      const auto rep = execute_run(cell, (dir / cell_name(k)).string());
      row.status = stepper::to_string(rep.result.outcome.status);
      row.t_end = rep.result.outcome.t;
      row.steps = rep.result.outcome.steps;
      row.message = rep.result.outcome.message;
      for (const auto& v : verdicts(rep.result.series, kSweepFunctionals,
                                    rep.result.outcome.status == stepper::RunStatus::BlowUp)) {
        row.verdict[v.functional] = v.status();
        const auto col = rep.result.series.column(v.functional);
        row.sup[v.functional] = col.empty() ? std::nan("") : *std::max_element(col.begin(), col.end());
      }
    } catch (const model::ValidationError& e) {
      row.status = "Invalid";
      row.message = e.what();
    } catch (const std::exception& e) {
      row.status = "Error";
      row.message = e.what();
    }
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  };

  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(rows.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      // Cells already run concurrently; keep each cell's kernels single-threaded.
      if (workers > 1) omp_set_num_threads(1);
      for (std::size_t k = next++; k < rows.size(); k = next++) run_cell(k);
    });
  }
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  const auto& cols = sweep_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) csv << (c ? "," : "") << cols[c];
  csv << '\n';
  auto num = [](const std::map<std::string, double>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? std::string() : format_double(it->second);
  };
  auto str = [](const std::map<std::string, std::string>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? std::string() : it->second;
  };
  for (const auto& r : rows) {
    csv << format_double(r.p) << ',' << format_double(r.mu) << ',' << format_double(r.chi) << ',' << r.status << ','
        << format_double(r.t_end) << ',' << r.steps << ',' << str(r.verdict, "sup_u") << ','
        << str(r.verdict, "llogl") << ',' << str(r.verdict, "phi") << ',' << num(r.sup, "sup_u") << ','
        << num(r.sup, "llogl") << ',' << num(r.sup, "phi") << ',' << format_double(r.wall_time) << ','
        << r.classification << ',' << r.citation << ',' << csv_safe(r.message) << '\n';
  }
  write_text(dir / "sweep.csv", csv.str());

  json cells = json::array();
  for (std::size_t k = 0; k < rows.size(); ++k)
    cells.push_back({{"dir", cell_name(k)}, {"p", rows[k].p}, {"mu", rows[k].mu}, {"chi", rows[k].chi},
                     {"status", rows[k].status}});
  json body{{"tool", "ksnbc"}, {"version", KSNBC_VERSION}, {"command", "sweep"}, {"config", to_json(config)},
            {"finished", utc_timestamp()}, {"cells", cells}};
  write_manifest(out_dir, body, {"sweep.csv"});
  return rows;
}

IneqSummary execute_ineq(const IneqConfig& config, const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const std::string started = utc_timestamp();
  const ineq::FieldEnsemble ensemble(config.ensemble);
  IneqSummary summary;
  std::vector<std::string> files;

  auto emit = [&](const std::string& name, const std::vector<ineq::ConstantFitReport>& reports) {
    std::ostringstream csv;
    ineq::write_report_csv(csv, reports);
    write_text(dir / (name + ".csv"), csv.str());
    files.push_back(name + ".csv");
    for (const auto& r : reports) {
      summary.violations += ineq::count_violations(r, ensemble);
      if (r.flagged) ++summary.flagged;
      summary.reports.push_back(r);
    }
  };

  for (const auto& lemma : config.lemmas) {
    if (lemma == "gny") {
      emit(lemma, ineq::gny_eta_sweep(ensemble, config.resolutions));
    } else if (lemma == "boundary_trace") {
      emit(lemma, {ineq::check_boundary_trace(ensemble, config.resolutions, config.r, config.p, config.eps)});
    } else if (lemma == "boundary_reg") {
      emit(lemma, ineq::boundary_reg_eta_sweep(ensemble, config.resolutions, config.r, config.p));
    } else if (lemma == "unif_gn") {
      if (config.ensemble.dim != 2) throw Error("unif_gn is a planar check; set ineq.dim = 2 or drop it");
      emit(lemma, {ineq::check_unif_gn_2d(ensemble, config.resolutions, config.gn_r, config.gn_p, config.gn_eta)});
    } else if (lemma == "convexity") {
      auto spec = config.ensemble;
      spec.family = ineq::Family::Cosine;
      const ineq::FieldEnsemble cosines(spec);
      std::ostringstream csv;
      csv << "member,cells,h,max_normal_derivative\n";
      summary.convexity_max = -std::numeric_limits<double>::infinity();
      for (int cells : config.resolutions) {
        const auto g = cosines.grid(cells);
        const double c = ineq::check_convexity_sign(grid::Field(g, 1.0));
        csv << "constant," << cells << ',' << format_double(g->min_spacing()) << ',' << format_double(c) << '\n';
        for (std::size_t m = 0; m < cosines.size(); ++m) {
          const double v = ineq::check_convexity_sign(cosines.sample(m, g));
          summary.convexity_max = std::max(summary.convexity_max, v);
          csv << m << ',' << cells << ',' << format_double(g->min_spacing()) << ',' << format_double(v) << '\n';
        }
      }
      write_text(dir / "convexity.csv", csv.str());
      files.push_back("convexity.csv");
    }
  }

  json fits = json::array();
  for (const auto& r : summary.reports)
    fits.push_back({{"lemma", r.lemma}, {"parameters", r.parameter_string()}, {"constant", r.constant()},
                    {"secondary", r.secondary()}, {"flagged", r.flagged}});
  json body{{"tool", "ksnbc"},
            {"version", KSNBC_VERSION},
            {"command", "ineq"},
            {"config", to_json(config)},
            {"started", started},
            {"finished", utc_timestamp()},
            {"fits", fits},
            {"violations", summary.violations},
            {"flagged", summary.flagged}};
  write_manifest(out_dir, body, files);
  return summary;
}

int report(const std::string& dir, std::ostream& out) {
  const json manifest = read_manifest(dir);
  const std::string command = manifest.value("command", "unknown");
  out << "directory: " << dir << "\n";
  out << "command:   " << command << " (ksnbc " << manifest.value("version", "?") << ")\n";
  if (manifest.contains("outcome")) {
    const auto& o = manifest["outcome"];
    out << "outcome:   " << o.value("status", "?") << " at t = " << o.value("t", 0.0) << " after "
        << o.value("steps", 0L) << " steps\n";
  }
  if (manifest.contains("classification"))
    out << "regime:    " << manifest["classification"].value("verdict", "?") << " ("
        << manifest["classification"].value("citation", "?") << ")\n";

  const fs::path series = fs::path(dir) / "series.csv";
  if (fs::exists(series)) {
    std::ifstream in(series);
    try {
      const auto s = monitors::MonitorSeries::read_csv(in);
      const bool blown_up = manifest.contains("outcome") && manifest["outcome"].value("status", "") == "BlowUp";
      out << "series:    " << s.size() << " samples\n";
      const std::vector<std::string> judged =
          command == "nbc" ? std::vector<std::string>{"sup_u", "l2"}
                           : std::vector<std::string>{"sup_u", "l2", "llogl", "gradv2", "phi", "psi"};
      for (const auto& v : verdicts(s, judged, blown_up)) {
        out << "  " << std::left << std::setw(8) << v.functional << ' ' << v.status();
        if (v.verdict) out << "  sup = " << format_double(v.verdict->sup) << "  slope = " << v.verdict->slope;
        out << '\n';
      }
    } catch (const std::exception& e) {
      // the checksum pass below decides the exit code
      out << "series:    unreadable (" << e.what() << ")\n";
    }
  }
  const fs::path sweep = fs::path(dir) / "sweep.csv";
  if (fs::exists(sweep)) {
    std::ifstream in(sweep);
    std::string line;
    std::getline(in, line);
    std::map<std::string, int> tally;
    int rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ++rows;
      const auto a = line.find(',', line.find(',', line.find(',') + 1) + 1);
      const auto b = line.find(',', a + 1);
      tally[line.substr(a + 1, b - a - 1)]++;
    }
    out << "sweep:     " << rows << " cells";
    for (const auto& [status, n] : tally) out << ", " << n << ' ' << status;
    out << '\n';
  }
  if (manifest.contains("fits")) {
    for (const auto& f : manifest["fits"])
      out << "  " << f.value("lemma", "?") << " [" << f.value("parameters", "") << "] C = " << f.value("constant", 0.0)
          << (f.value("flagged", false) ? "  FLAGGED" : "") << '\n';
  }

  const auto check = verify_manifest(dir);
  if (check.ok()) {
    out << "checksums: " << check.checked << " files verified\n";
    return kExitOk;
  }
  out << "checksums: " << check.mismatched.size() << " of " << check.checked << " files differ:";
  for (const auto& m : check.mismatched) out << ' ' << m;
  out << '\n';
  return kExitError;
}

std::string resolve_output_dir(const CliOverrides& overrides, const std::string& configured,
                               const std::string& command) {
  if (overrides.out) return *overrides.out;
  if (const char* env = std::getenv("KSNBC_OUT"); env && *env) return env;
  if (!configured.empty()) return configured;
  return (fs::path("ksnbc-out") / command).string();
}

}  // namespace ksnbc::harness
