#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ksnbc/inequality_lab.hpp"
#include "json.hpp"
#include "ksnbc/simulation.hpp"

namespace ksnbc::harness {

/// Malformed or unknown configuration content. Carries the offending key
/// (dotted path) and its 1-based line when known.
class ParseError : public Error {
 public:
  ParseError(std::string key, long line, const std::string& what);
  [[nodiscard]] const std::string& key() const { return key_; }
  [[nodiscard]] long line() const { return line_; }

 private:
  std::string key_;
  long line_;
};

struct GridSpec {
  int dim = 2;
  int nx = 64;
  int ny = 64;
  double lx = 1.0;
  double ly = 1.0;

  [[nodiscard]] grid::GridPtr build() const;
};

struct InitialSpec {
  enum class Kind { Constant, GaussianBump, CosineMode, File };
  Kind kind = Kind::Constant;
  double value = 0.0;                       ///< constant
  std::array<double, 2> center{0.5, 0.5};   ///< gaussian-bump
  double width = 0.1;                       ///< gaussian-bump standard deviation
  double amplitude = 1.0;                   ///< gaussian-bump, cosine-mode
  double base = 0.0;                        ///< gaussian-bump, cosine-mode offset
  std::array<int, 2> k{1, 0};               ///< cosine-mode wavenumbers: cos(k₀πx/Lx)cos(k₁πy/Ly)
  std::string path;                         ///< file (snapshot CSV)

  /// Cell values on `grid`; throws if the result is negative or non-finite.
  [[nodiscard]] grid::Field build(const grid::GridPtr& grid, const std::string& name) const;
};
[[nodiscard]] const char* to_string(InitialSpec::Kind kind);

struct RunConfig {
  enum class Mode { KellerSegel, Nbc };
  Mode mode = Mode::KellerSegel;
  model::ModelParams model;
  model::NbcParams nbc;
  GridSpec grid;
  InitialSpec u0;
  InitialSpec v0;
  double horizon = 0.0;
  stepper::StepperOptions stepper;
  monitors::MonitorConfig monitor;
  std::string output_dir;
  std::uint64_t seed = 0;

  [[nodiscard]] stepper::Problem problem() const;
};

struct SweepConfig {
  RunConfig base;
  std::vector<double> p;
  std::vector<double> mu;
  std::vector<double> chi;  ///< optional third axis; empty means base χ only
  double horizon = 0.0;
  int workers = 1;
  int max_cells = 400;

  [[nodiscard]] std::size_t cell_count() const;
};

struct IneqConfig {
  ineq::EnsembleSpec ensemble;
  std::vector<int> resolutions{64, 128};
  std::vector<std::string> lemmas{"gny", "boundary_trace", "boundary_reg", "unif_gn", "convexity"};
  double r = 1.0;        ///< boundary lemmas
  double p = 1.25;       ///< boundary lemmas
  double eps = 0.5;      ///< additive-constant trace lemma
  double gn_r = 1.0;     ///< planar GN lemma
  double gn_p = 2.0;
  double gn_eta = 0.5;
  std::string output_dir;
};

using Config = std::variant<RunConfig, SweepConfig, IneqConfig>;

struct LoadOptions {
  bool strict = true;  ///< unknown keys are errors (otherwise warnings on stderr)
};

/// Parses and validates a TOML experiment file. The table set decides the
/// kind: [sweep] → SweepConfig, [ineq] → IneqConfig, otherwise RunConfig
/// ([model] for the chemotaxis system, [nbc] for the scalar problem).
///
/// Throws Error naming the path when the file is unreadable, ParseError for
/// syntax, type and unknown-key problems, model::ValidationError for
/// parameter violations.
[[nodiscard]] Config load_config(const std::string& path, const LoadOptions& options = {});
[[nodiscard]] Config parse_config(const std::string& text, const std::string& source_name,
                                  const LoadOptions& options = {});

/// Effective configuration with all defaults filled, as echoed in manifests.
[[nodiscard]] nlohmann::json to_json(const RunConfig& config);
[[nodiscard]] nlohmann::json to_json(const SweepConfig& config);
[[nodiscard]] nlohmann::json to_json(const IneqConfig& config);

/// Human-readable schema printed on usage errors.
[[nodiscard]] const char* config_schema();

}  // namespace ksnbc::harness
