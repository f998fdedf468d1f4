#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ksnbc/grid.hpp"

/// Empirical checks of the functional inequalities behind the a priori
/// estimates. The inequalities are true for all admissible functions, so the
/// lab runs them in reverse: a fitted constant that grows with resolution, or
/// a sign violation, points at a defect in the discrete calculus (quadrature,
/// traces, gradients), not at the inequality.
namespace ksnbc::ineq {

using grid::Field;
using grid::GridPtr;

enum class Family {
  Trigonometric,  ///< cosine/sine products with random phases
  Cosine,         ///< cosine-only products (discrete Neumann compatible)
  BoundaryBump,   ///< Gaussian bumps centered on the boundary
  Mixed,          ///< every fourth member a boundary bump, the rest trigonometric
};
[[nodiscard]] const char* to_string(Family family);
[[nodiscard]] Family family_from_string(const std::string& name);

struct EnsembleSpec {
  std::uint64_t seed = 1;
  int count = 200;
  int dim = 2;
  double lx = 1.0;
  double ly = 1.0;
  int max_wavenumber = 4;  ///< modes cos(πk·x/L) with k ≤ max_wavenumber
  double amplitude = 1.0;
  Family family = Family::Mixed;
};

/// Reproducible set of smooth functions on [0,Lx]×[0,Ly] (or [0,Lx]).
/// Members are analytic, so the same ensemble can be sampled on any grid.
class FieldEnsemble {
 public:
  explicit FieldEnsemble(EnsembleSpec spec);

  [[nodiscard]] const EnsembleSpec& spec() const { return spec_; }
  [[nodiscard]] std::size_t size() const { return members_.size(); }
  [[nodiscard]] double value(std::size_t member, double x, double y) const;
  [[nodiscard]] Field sample(std::size_t member, const GridPtr& grid) const;
  /// Grid with `cells` per axis; rejects resolutions below 4 × max_wavenumber.
  [[nodiscard]] GridPtr grid(int cells) const;

 private:
  struct Mode {
    int kx, ky;
    double coef, phase_x, phase_y;
  };
  struct Bump {
    double cx, cy, width, height;
  };
  struct Member {
    double offset = 0.0;
    std::vector<Mode> modes;
    std::vector<Bump> bumps;
  };

  EnsembleSpec spec_;
  std::vector<Member> members_;
};

struct ResolutionFit {
  int cells = 0;
  double constant = 0.0;   ///< fitted primary constant
  double secondary = 0.0;  ///< additive constant C(η) for the two-coefficient fit, else 0
  long attaining_index = -1;  ///< ensemble member that sets `constant` (−1 if none)
  std::vector<double> required;  ///< per-member minimal constant
};

struct ConstantFitReport {
  std::string lemma;  ///< "gny", "boundary_trace", "boundary_reg", "unif_gn"
  std::vector<std::pair<std::string, double>> parameters;
  std::uint64_t seed = 0;
  std::vector<ResolutionFit> fits;
  bool flagged = false;  ///< some member's requirement grew by more than 2× with resolution
  std::vector<std::size_t> flagged_members;

  /// Constant valid at every evaluated resolution.
  [[nodiscard]] double constant() const;
  [[nodiscard]] double secondary() const;
  [[nodiscard]] const ResolutionFit& at(int cells) const;
  [[nodiscard]] std::string parameter_string() const;
};

/// ∫f² ≤ Cη∫|∇f|² + Cη^{−n/2}(∫|f|)².
[[nodiscard]] ConstantFitReport check_gny(const FieldEnsemble& ensemble, const std::vector<int>& resolutions,
                                          double eta);
inline const std::vector<double> kGnyEtas = {0.9, 0.5, 0.1, 0.01};
[[nodiscard]] std::vector<ConstantFitReport> gny_eta_sweep(const FieldEnsemble& ensemble,
                                                           const std::vector<int>& resolutions);

/// ∫_∂Ω|g|^{p+2r−1} ≤ ε∫|g|^{2r+1} + ε∫|∇|g|^r|² + C, fitting the additive C.
[[nodiscard]] ConstantFitReport check_boundary_trace(const FieldEnsemble& ensemble,
                                                     const std::vector<int>& resolutions, double r, double p,
                                                     double eps);

/// ∫_∂Ω|g|^{p+2r−1} ≤ η∫|g|^{2r+1} + η∫|∇|g|^r|² + cη^{(n+2)/(2p−3)}(∫|g|^r)².
[[nodiscard]] ConstantFitReport check_boundary_reg(const FieldEnsemble& ensemble,
                                                   const std::vector<int>& resolutions, double r, double p,
                                                   double eta);
inline const std::vector<double> kBoundaryRegEtas = {0.4, 0.2, 0.1};
[[nodiscard]] std::vector<ConstantFitReport> boundary_reg_eta_sweep(const FieldEnsemble& ensemble,
                                                                    const std::vector<int>& resolutions, double r,
                                                                    double p);

/// ‖u‖_p^p ≤ η‖∇u‖₂^{p−r}‖u ln|u|‖_r^r + C‖u‖_r^p + C(η), planar only.
/// Two nonnegative coefficients fitted lexicographically: C(η) first, then C.
[[nodiscard]] ConstantFitReport check_unif_gn_2d(const FieldEnsemble& ensemble, const std::vector<int>& resolutions,
                                                 double r, double p, double eta);

/// One function's inequality in the normal form lhs ≤ base + C·coef (+ C(η)).
struct InequalityTerms {
  double lhs = 0.0;
  double base = 0.0;
  double coef = 0.0;
};

/// Evaluates one lemma's terms on a single field. `parameters` use the same
/// names as ConstantFitReport::parameters (eta; r, p, eps; r, p, eta).
[[nodiscard]] InequalityTerms evaluate_terms(const std::string& lemma,
                                             const std::vector<std::pair<std::string, double>>& parameters,
                                             const Field& f);

/// Re-checks every member at every resolution against the report's own
/// constants. Zero for any report produced by the functions above.
[[nodiscard]] std::size_t count_violations(const ConstantFitReport& report, const FieldEnsemble& ensemble);

/// Largest outward normal derivative of |∇f|² over boundary faces, from a
/// second-order one-sided difference of the cell-centered |∇f|².
/// Exactly 0 for constant fields.
[[nodiscard]] double check_convexity_sign(const Field& f);

struct TrajectoryTraceCheck {
  double required = 0.0;       ///< minimal additive constant C on this snapshot
  double signal_energy = 0.0;  ///< ∫|∇v|², to compare against the bound A
};

/// ∫_∂Ω u^p|∇v|² ≤ ε∫(u³ + |∇u|² + u²|∇v|² + |∇|∇v|²|²) + C on one (u, v) snapshot.
[[nodiscard]] TrajectoryTraceCheck check_trajectory_trace(const Field& u, const Field& v, double p, double eps);

/// CSV columns: lemma,parameters,cells,constant,secondary,attaining_index,seed,flagged
void write_report_csv(std::ostream& out, const std::vector<ConstantFitReport>& reports);

}  // namespace ksnbc::ineq
