#include "ksnbc/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ksnbc::model {

namespace {

constexpr double kCriticalBoundaryExponent = 1.5;
constexpr double kSpatialParabolicExponent = 1.4;
constexpr double kUpperExplorationExponent = 3.0;

std::string join(const std::vector<Violation>& violations) {
  std::ostringstream out;
  out << "invalid parameters:";
  for (const auto& v : violations) out << "\n  " << v.field << ": " << v.message << " [" << to_string(v.kind) << "]";
  return out.str();
}

bool same_value(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); }

}  // namespace

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Missing: return "Missing";
    case ViolationKind::NonPositiveRate: return "NonPositiveRate";
    case ViolationKind::NegativeDamping: return "NegativeDamping";
    case ViolationKind::BadExponent: return "BadExponent";
    case ViolationKind::BadTau: return "BadTau";
    case ViolationKind::BadDimension: return "BadDimension";
    case ViolationKind::ExplorationRequired: return "ExplorationRequired";
  }
  return "Unknown";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::GuaranteedBounded: return "GuaranteedBounded";
    case Verdict::BorderlineBounded: return "BorderlineBounded";
    case Verdict::NoGuarantee: return "NoGuarantee";
  }
  return "Unknown";
}

const char* to_string(Citation citation) {
  switch (citation) {
    case Citation::None: return "none";
    case Citation::ParabolicEllipticTheorem: return "parabolic-elliptic (mu > (n-2)/n chi alpha, p < 3/2)";
    case Citation::ParabolicEllipticBorderline: return "parabolic-elliptic borderline (mu = (n-2)/n chi alpha, n >= 3, p < 1+1/n)";
    case Citation::PlanarParabolicTheorem: return "parabolic-parabolic n=2 (p < 3/2)";
    case Citation::SpatialParabolicTheorem: return "parabolic-parabolic n=3 (p < 7/5, mu > mu0)";
  }
  return "unknown";
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(join(violations)), violations_(std::move(violations)) {}

bool ValidationError::has(ViolationKind kind) const {
  return std::any_of(violations_.begin(), violations_.end(), [kind](const Violation& v) { return v.kind == kind; });
}

ModelParams validate(const RawParams& raw) {
  std::vector<Violation> bad;
  auto require = [&](const std::optional<double>& value, const char* name) {
    if (!value) bad.push_back({ViolationKind::Missing, name, "required parameter is missing"});
    return value.value_or(0.0);
  };

  ModelParams out;
  out.exploration = raw.exploration;
  out.chi = require(raw.chi, "chi");
  out.a = require(raw.a, "a");
  out.mu = require(raw.mu, "mu");
  out.alpha = require(raw.alpha, "alpha");
  out.beta = require(raw.beta, "beta");
  out.p = require(raw.p, "p");

  for (auto [value, name] : {std::pair{raw.a, "a"}, std::pair{raw.alpha, "alpha"}, std::pair{raw.beta, "beta"}}) {
    if (value && !(*value > 0.0)) bad.push_back({ViolationKind::NonPositiveRate, name, "must be > 0"});
  }
  if (raw.chi && !std::isfinite(*raw.chi)) bad.push_back({ViolationKind::BadExponent, "chi", "must be finite"});

  if (raw.mu) {
    if (!(*raw.mu >= 0.0)) {
      bad.push_back({ViolationKind::NegativeDamping, "mu", "must be >= 0"});
    } else if (*raw.mu == 0.0 && !raw.exploration) {
      bad.push_back({ViolationKind::ExplorationRequired, "mu", "mu = 0 is only accepted with exploration = true"});
    }
  }

  if (raw.p) {
    if (!(*raw.p > 1.0)) {
      bad.push_back({ViolationKind::BadExponent, "p", "boundary exponent requires p > 1"});
    } else if (!(*raw.p < kUpperExplorationExponent)) {
      bad.push_back({ViolationKind::BadExponent, "p", "boundary exponent must be < 3"});
    } else if (*raw.p >= kCriticalBoundaryExponent && !raw.exploration) {
      bad.push_back({ViolationKind::ExplorationRequired, "p", "p >= 3/2 is only accepted with exploration = true"});
    }
  }

  if (!raw.tau) {
    bad.push_back({ViolationKind::Missing, "tau", "required parameter is missing"});
  } else if (*raw.tau != 0 && *raw.tau != 1) {
    bad.push_back({ViolationKind::BadTau, "tau", "must be 0 (parabolic-elliptic) or 1 (parabolic-parabolic)"});
  } else {
    out.tau = *raw.tau;
  }

  if (!raw.dim) {
    bad.push_back({ViolationKind::Missing, "dim", "required parameter is missing"});
  } else if (*raw.dim < 1 || *raw.dim > 3) {
    bad.push_back({ViolationKind::BadDimension, "dim", "must be 1, 2 or 3"});
  } else {
    out.dim = *raw.dim;
  }

  if (!bad.empty()) throw ValidationError(std::move(bad));
  return out;
}

NbcParams validate(const RawNbcParams& raw) {
  std::vector<Violation> bad;
  NbcParams out;
  if (!raw.mu) {
    bad.push_back({ViolationKind::Missing, "mu", "required parameter is missing"});
  } else if (!(*raw.mu > 0.0)) {
    bad.push_back({ViolationKind::NonPositiveRate, "mu", "must be > 0"});
  } else {
    out.mu = *raw.mu;
  }
  for (auto [value, name, slot] : {std::tuple{raw.Q, "Q", &out.Q}, std::tuple{raw.P, "P", &out.P}}) {
    if (!value) {
      bad.push_back({ViolationKind::Missing, name, "required parameter is missing"});
    } else if (!(*value > 1.0)) {
      bad.push_back({ViolationKind::BadExponent, name, "exponent must be > 1"});
    } else {
      *slot = *value;
    }
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));
  return out;
}

double mu_critical_pe(int n, double chi, double alpha) {
  return static_cast<double>(n - 2) / static_cast<double>(n) * chi * alpha;
}

double mu0_3d(double chi, double a, double alpha) {
  if (!(chi > -2.0)) throw DegenerateDenominatorError("mu0 requires chi > -2 (denominator 2 + chi)");
  const double growth = 2.0 * (a + 1.0) / (2.0 + chi);
  const double coupling = 3.0 * (chi / (2.0 + chi) + 7.0 * alpha * alpha + (chi * chi + 2.0) / 2.0);
  return std::max({1.0 / 3.0, growth, coupling});
}

RegimeClassification classify_regime(const ModelParams& params) {
  RegimeClassification out;
  const int n = params.dim;
  std::ostringstream note;

  if (n < 2) {
    out.note = "n = 1 grids are a testing device; boundedness theorems assume n >= 2";
    return out;
  }

  if (params.tau == 0) {
    const double mu_crit = mu_critical_pe(n, params.chi, params.alpha);
    out.thresholds.mu_critical = mu_crit;
    out.thresholds.p_limit = kCriticalBoundaryExponent;
    if (params.mu > 0.0 && params.mu > mu_crit && !same_value(params.mu, mu_crit)) {
      if (params.p < kCriticalBoundaryExponent) {
        out.verdict = Verdict::GuaranteedBounded;
        out.citation = Citation::ParabolicEllipticTheorem;
        return out;
      }
      note << "p = " << params.p << " >= 3/2";
    } else if (n >= 3 && params.mu > 0.0 && same_value(params.mu, mu_crit)) {
      const double p_border = 1.0 + 1.0 / n;
      out.thresholds.p_limit = p_border;
      if (params.p < p_border) {
        out.verdict = Verdict::BorderlineBounded;
        out.citation = Citation::ParabolicEllipticBorderline;
        return out;
      }
      note << "mu at the critical value but p = " << params.p << " >= 1 + 1/n = " << p_border;
    } else {
      note << "mu = " << params.mu << " does not exceed mu_crit = " << mu_crit;
      if (params.mu <= 0.0) note << " (theorems require mu > 0)";
    }
    out.note = note.str();
    return out;
  }

  if (n == 2) {
    out.thresholds.p_limit = kCriticalBoundaryExponent;
    if (params.mu > 0.0 && params.p < kCriticalBoundaryExponent) {
      out.verdict = Verdict::GuaranteedBounded;
      out.citation = Citation::PlanarParabolicTheorem;
      return out;
    }
    if (params.mu <= 0.0) note << "mu = 0 (theorems require mu > 0); ";
    if (params.p >= kCriticalBoundaryExponent) note << "p = " << params.p << " >= 3/2";
    out.note = note.str();
    return out;
  }

  if (n == 3) {
    out.thresholds.p_limit = kSpatialParabolicExponent;
    if (!(params.chi > -2.0)) {
      out.note = "mu0 undefined for chi <= -2";
      return out;
    }
    const double mu0 = mu0_3d(params.chi, params.a, params.alpha);
    out.thresholds.mu0 = mu0;
    if (params.p < kSpatialParabolicExponent && params.mu > mu0) {
      out.verdict = Verdict::GuaranteedBounded;
      out.citation = Citation::SpatialParabolicTheorem;
      return out;
    }
    if (params.p >= kSpatialParabolicExponent) note << "p = " << params.p << " >= 7/5; ";
    if (params.mu <= mu0) note << "mu = " << params.mu << " <= mu0 = " << mu0;
    out.note = note.str();
    return out;
  }

  out.note = "no boundedness result for n >= 4";
  return out;
}

}  // namespace ksnbc::model
