#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ksnbc/stepper.hpp"

namespace ksnbc::monitors {

using grid::Field;

/// Functionals evaluated on one state. Columns of series.csv, in order.
struct MonitorRecord {
  double t = 0.0;
  double mass = 0.0;             ///< ∫u
  double l1 = 0.0;               ///< ‖u‖_1
  double l2 = 0.0;               ///< ‖u‖_2
  double l4 = 0.0;               ///< ‖u‖_4
  double llogl = 0.0;            ///< ∫(u+1)ln(u+1)
  double gradv2 = 0.0;           ///< ∫|∇v|²
  double gradv4 = 0.0;           ///< ∫|∇v|⁴
  double phi = 0.0;              ///< ½∫u² + ¼∫|∇v|⁴
  double psi = 0.0;              ///< ∫u² + ∫|∇v|⁴ + ⅓∫u|∇v|²
  double sup_u = 0.0;            ///< max u
  double boundary_influx = 0.0;  ///< ∫_∂Ω trace(u)^p dS
  double dt = 0.0;
  std::vector<double> extra_norms;  ///< ‖u‖_r for MonitorConfig::extra_r
};

struct MonitorConfig {
  int cadence = 10;  ///< sample every `cadence` accepted steps (plus first and last state)
  /// Additional L^r norms beyond the fixed l1, l2, l4 columns.
  std::vector<double> extra_r;
};

class InsufficientSamplesError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Evaluates every tracked functional. `boundary_exponent` is p (or P).
[[nodiscard]] MonitorRecord sample(const stepper::SimState& state, double boundary_exponent,
                                   const std::vector<double>& extra_r = {});
[[nodiscard]] MonitorRecord sample(const stepper::SimState& state, const stepper::Problem& problem,
                                   const std::vector<double>& extra_r = {});

class MonitorSeries {
 public:
  static const std::vector<std::string>& fixed_columns();

  MonitorSeries() = default;
  explicit MonitorSeries(std::vector<double> extra_r) : extra_r_(std::move(extra_r)) {}

  void push(MonitorRecord record);
  [[nodiscard]] std::size_t size() const { return records_.size(); }
  [[nodiscard]] bool empty() const { return records_.empty(); }
  [[nodiscard]] const std::vector<MonitorRecord>& records() const { return records_; }
  [[nodiscard]] const MonitorRecord& back() const { return records_.back(); }
  [[nodiscard]] std::vector<std::string> columns() const;
  /// Values of one column by name ("t", "mass", ..., "l8" for extras).
  [[nodiscard]] std::vector<double> column(std::string_view name) const;
  [[nodiscard]] std::vector<double> times() const { return column("t"); }

  void write_csv(std::ostream& out) const;
  [[nodiscard]] static MonitorSeries read_csv(std::istream& in);

 private:
  std::vector<double> extra_r_;
  std::vector<MonitorRecord> records_;
};

enum class VerdictStatus { Bounded, Growing, BlownUp };
[[nodiscard]] const char* to_string(VerdictStatus status);

struct VerdictOptions {
  double window = 0.5;      ///< trailing fraction of the sampled time span
  double slope_tol = 1e-3;  ///< per unit time, on log(value + eps0)
  double blowup_cap = 1e6;
  double eps0 = 1e-300;
  std::size_t min_samples = 16;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::Bounded;
  double sup = 0.0;    ///< over all samples
  double slope = 0.0;  ///< least-squares log-slope on the trailing window
};

/// Boundedness verdict for one functional. `blown_up` forces BlownUp.
[[nodiscard]] Verdict verdict(const MonitorSeries& series, std::string_view functional, bool blown_up = false,
                              const VerdictOptions& options = {});

struct MoserLadder {
  std::vector<double> exponents;  ///< 2^k r₀
  std::vector<double> norms;      ///< ‖u‖_{L^{2^k r₀}} on the unit-measure rescaled domain
  std::vector<double> log_norms;
};

/// Norm ladder r₀, 2r₀, 4r₀, ... (K+1 rungs) in log-domain arithmetic.
[[nodiscard]] MoserLadder moser_ladder(const Field& u, double r0, int levels);

struct GronwallReport {
  double lambda = 0.0;
  std::vector<double> forcing;  ///< y' + λy by finite differences
  double sup_forcing = 0.0;
  std::size_t violations = 0;
  double max_excess = 0.0;  ///< largest y − envelope (negative when the envelope holds with room)
  [[nodiscard]] bool envelope_holds() const { return violations == 0; }
};

/// Reconstructs the forcing c(t) = y' + λy of a sampled series and checks
///   y(t) ≤ e^{−λ(t−t₀)} y(t₀) + (sup c / λ)(1 − e^{−λ(t−t₀)}) + tol,
/// with tol = relative_tol · max|y|.
[[nodiscard]] GronwallReport gronwall_report(const std::vector<double>& t, const std::vector<double>& y, double lambda,
                                             double relative_tol = 1e-3);
[[nodiscard]] GronwallReport gronwall_report(const MonitorSeries& series, std::string_view functional, double lambda,
                                             double relative_tol = 1e-3);

}  // namespace ksnbc::monitors
