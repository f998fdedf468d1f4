#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ksnbc/error.hpp"

namespace ksnbc::model {

/// Coefficients of the chemotaxis system
///   u_t = Δu − χ∇·(u∇v) + au − μu²,   τ v_t = Δv + αu − βv,
/// with ∂u/∂ν = |u|^p and ∂v/∂ν = 0 on the boundary.
///
/// Construct through validate() for external input. The aggregate stays open
/// so that verification code can build degenerate cases (a = 0, μ = 0) that
/// the validator rejects.
struct ModelParams {
  double chi = 1.0;
  double a = 1.0;
  double mu = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  int tau = 1;
  double p = 1.3;
  int dim = 2;
  bool exploration = false;
};

/// Scalar problem U_t = ΔU − μU^Q, ∂U/∂ν = U^P.
struct NbcParams {
  double mu = 1.0;
  double Q = 2.0;
  double P = 1.2;

  /// Boundary exponent separating global boundedness from blow-up: (Q+1)/2.
  [[nodiscard]] double critical_exponent() const { return 0.5 * (Q + 1.0); }
};

/// Unvalidated parameter record, as read from a config file.
struct RawParams {
  std::optional<double> chi, a, mu, alpha, beta, p;
  std::optional<int> tau, dim;
  bool exploration = false;
};

struct RawNbcParams {
  std::optional<double> mu, Q, P;
};

enum class ViolationKind {
  Missing,
  NonPositiveRate,
  NegativeDamping,
  BadExponent,
  BadTau,
  BadDimension,
  ExplorationRequired,
};

[[nodiscard]] const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string field;
  std::string message;
};

/// Structured rejection: every violated constraint is listed, not only the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  [[nodiscard]] const std::vector<Violation>& violations() const { return violations_; }
  [[nodiscard]] bool has(ViolationKind kind) const;

 private:
  std::vector<Violation> violations_;
};

class DegenerateDenominatorError : public Error {
 public:
  using Error::Error;
};

[[nodiscard]] ModelParams validate(const RawParams& raw);
[[nodiscard]] NbcParams validate(const RawNbcParams& raw);

/// Damping threshold of the parabolic–elliptic theorem: (n−2)/n · χα.
[[nodiscard]] double mu_critical_pe(int n, double chi, double alpha);

/// Explicit sufficient damping for the 3D parabolic–parabolic case:
/// max{1/3, 2(a+1)/(2+χ), 3(χ/(2+χ) + 7α² + (χ²+2)/2)}. Requires χ > −2.
[[nodiscard]] double mu0_3d(double chi, double a, double alpha);

enum class Verdict { GuaranteedBounded, BorderlineBounded, NoGuarantee };
enum class Citation { None, ParabolicEllipticTheorem, ParabolicEllipticBorderline, PlanarParabolicTheorem, SpatialParabolicTheorem };

[[nodiscard]] const char* to_string(Verdict verdict);
[[nodiscard]] const char* to_string(Citation citation);

struct Thresholds {
  std::optional<double> mu_critical;
  std::optional<double> mu0;
  std::optional<double> p_limit;
};

struct RegimeClassification {
  Verdict verdict = Verdict::NoGuarantee;
  Citation citation = Citation::None;
  Thresholds thresholds;
  std::string note;
};

[[nodiscard]] RegimeClassification classify_regime(const ModelParams& params);

}  // namespace ksnbc::model
