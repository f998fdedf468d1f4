#include <doctest.h>

#include "ksnbc/model.hpp"
#include "oracles.hpp"

using namespace ksnbc::model;

namespace {

RawParams standard() {
  RawParams r;
  r.chi = 1.0;
  r.a = 1.0;
  r.mu = 1.0;
  r.alpha = 1.0;
  r.beta = 1.0;
  r.tau = 1;
  r.p = 1.3;
  r.dim = 2;
  return r;
}

ModelParams params(int tau, int dim, double mu, double p, double chi = 1.0, double alpha = 1.0, double a = 1.0) {
  ModelParams m;
  m.tau = tau;
  m.dim = dim;
  m.mu = mu;
  m.p = p;
  m.chi = chi;
  m.alpha = alpha;
  m.a = a;
  return m;
}

ViolationKind sole_violation(const RawParams& raw) {
  try {
    (void)validate(raw);
  } catch (const ValidationError& e) {
    REQUIRE(e.violations().size() == 1);
    return e.violations().front().kind;
  }
  FAIL("expected a ValidationError");
  return ViolationKind::Missing;
}

}  // namespace

TEST_CASE("validate accepts the standard planar parameter set") {
  const auto m = validate(standard());
  CHECK(m.chi == 1.0);
  CHECK(m.p == 1.3);
  CHECK(m.tau == 1);
  CHECK(m.dim == 2);
}

TEST_CASE("validate rejects each violated constraint with its kind") {
  auto r = standard();
  r.p = 0.9;
  CHECK(sole_violation(r) == ViolationKind::BadExponent);
  r = standard();
  r.p = 1.0;
  CHECK(sole_violation(r) == ViolationKind::BadExponent);
  r = standard();
  r.beta = 0.0;
  CHECK(sole_violation(r) == ViolationKind::NonPositiveRate);
  r = standard();
  r.tau = 2;
  CHECK(sole_violation(r) == ViolationKind::BadTau);
  r = standard();
  r.dim = 4;
  CHECK(sole_violation(r) == ViolationKind::BadDimension);
  r = standard();
  r.mu = -1.0;
  CHECK(sole_violation(r) == ViolationKind::NegativeDamping);
  r = standard();
  r.alpha.reset();
  CHECK(sole_violation(r) == ViolationKind::Missing);
}

TEST_CASE("validate lists every violation, not only the first") {
  auto r = standard();
  r.a = 0.0;
  r.alpha = -2.0;
  r.p = 0.5;
  try {
    (void)validate(r);
    FAIL("expected a ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.violations().size() == 3);
    CHECK(e.has(ViolationKind::NonPositiveRate));
    CHECK(e.has(ViolationKind::BadExponent));
    CHECK(std::string(e.what()).find("p") != std::string::npos);
  }
}

TEST_CASE("exploration flag gates mu = 0 and p >= 3/2") {
  auto r = standard();
  r.mu = 0.0;
  CHECK(sole_violation(r) == ViolationKind::ExplorationRequired);
  r.exploration = true;
  CHECK(validate(r).mu == 0.0);

  r = standard();
  r.p = 1.7;
  CHECK(sole_violation(r) == ViolationKind::ExplorationRequired);
  r.exploration = true;
  CHECK(validate(r).p == 1.7);
  r.p = 3.0;
  CHECK(sole_violation(r) == ViolationKind::BadExponent);
}

TEST_CASE("negative chemosensitivity is accepted") { 
  auto r = standard();
  r.chi = -0.5;
  CHECK(validate(r).chi == -0.5);
}

TEST_CASE("scalar problem validation and critical exponent") {
  RawNbcParams r;
  r.mu = 1.0;
  r.Q = 2.0;
  r.P = 1.2;
  const auto n = validate(r);
  CHECK(n.critical_exponent() == doctest::Approx(1.5).epsilon(1e-15));
  r.Q = 1.0;
  CHECK_THROWS_AS((void)validate(r), ValidationError);
  r.Q = 2.0;
  r.mu = 0.0;
  CHECK_THROWS_AS((void)validate(r), ValidationError);
  r.mu = 1.0;
  r.P = 1.0;
  CHECK_THROWS_AS((void)validate(r), ValidationError);
}

TEST_CASE("threshold formulas agree with direct re-evaluation") {
  struct Pe {
    int n;
    double chi, alpha, expected;
  };
  for (const Pe& c : {Pe{2, 5.0, 2.0, 0.0}, Pe{3, 1.0, 1.0, 1.0 / 3.0}, Pe{4, 2.0, 1.0, 1.0}}) {
    CHECK(std::abs(mu_critical_pe(c.n, c.chi, c.alpha) - c.expected) <= 1e-12);
    CHECK(std::abs(mu_critical_pe(c.n, c.chi, c.alpha) - oracle::mu_critical(c.n, c.chi, c.alpha)) <= 1e-12);
  }
  struct M0 {
    double chi, a, alpha, expected;
  };
  for (const M0& c : {M0{1.0, 1.0, 1.0, 26.5}, M0{2.0, 1.0, 1.0, 31.5}, M0{1.0, 100.0, 0.01, 202.0 / 3.0}}) {
    CHECK(std::abs(mu0_3d(c.chi, c.a, c.alpha) - c.expected) <= 1e-12);
    CHECK(std::abs(mu0_3d(c.chi, c.a, c.alpha) - oracle::mu0(c.chi, c.a, c.alpha)) <= 1e-12);
  }
  CHECK_THROWS_AS((void)mu0_3d(-2.0, 1.0, 1.0), DegenerateDenominatorError);
  CHECK_THROWS_AS((void)mu0_3d(-3.0, 1.0, 1.0), DegenerateDenominatorError);
}

TEST_CASE("threshold properties hold on random inputs") {
  oracle::Rng rng(11);
  for (int k = 0; k < 500; ++k) {
    const double chi = rng.uniform(-1.9, 10.0);
    const double alpha = rng.uniform(0.01, 5.0);
    const double a = rng.uniform(0.01, 5.0);
    CHECK(mu_critical_pe(2, chi, alpha) == 0.0);
    CHECK(mu0_3d(chi, a, alpha) >= 1.0 / 3.0);
  }
}

TEST_CASE("classify_regime reproduces the listed regimes") {
  auto c = classify_regime(params(0, 2, 0.5, 1.3));
  CHECK(c.verdict == Verdict::GuaranteedBounded);
  CHECK(c.citation == Citation::ParabolicEllipticTheorem);
  REQUIRE(c.thresholds.mu_critical);
  CHECK(*c.thresholds.mu_critical == 0.0);

  c = classify_regime(params(1, 3, 100.0, 1.45));
  CHECK(c.verdict == Verdict::NoGuarantee);
  REQUIRE(c.thresholds.p_limit);
  CHECK(*c.thresholds.p_limit == doctest::Approx(1.4));

  c = classify_regime(params(0, 3, 1.0 / 3.0, 1.2));
  CHECK(c.verdict == Verdict::BorderlineBounded);
  CHECK(c.citation == Citation::ParabolicEllipticBorderline);

  c = classify_regime(params(1, 2, 1.0, 1.3));
  CHECK(c.verdict == Verdict::GuaranteedBounded);
  CHECK(c.citation == Citation::PlanarParabolicTheorem);

  c = classify_regime(params(1, 3, 30.0, 1.3));
  CHECK(c.verdict == Verdict::GuaranteedBounded);
  CHECK(c.citation == Citation::SpatialParabolicTheorem);
  c = classify_regime(params(1, 3, 20.0, 1.3));
  CHECK(c.verdict == Verdict::NoGuarantee);

  c = classify_regime(params(1, 1, 1.0, 1.3));
  CHECK(c.verdict == Verdict::NoGuarantee);
  CHECK_FALSE(c.note.empty());
}

TEST_CASE("classify_regime never guarantees boundedness for p >= 3/2 and is monotone in mu") {
  oracle::Rng rng(5);
  for (int k = 0; k < 400; ++k) {
    const int tau = k % 2;
    const int dim = 2 + (k / 2) % 2;
    const double p = rng.uniform(1.01, 2.9);
    const double chi = rng.uniform(-1.5, 4.0);
    const double mu1 = rng.uniform(0.0, 40.0);
    const double mu2 = mu1 + rng.uniform(0.0, 40.0);
    const auto c1 = classify_regime(params(tau, dim, mu1, p, chi));
    const auto c2 = classify_regime(params(tau, dim, mu2, p, chi));
    if (p >= 1.5) CHECK(c1.verdict != Verdict::GuaranteedBounded);
    if (c1.verdict == Verdict::GuaranteedBounded) CHECK(c2.verdict == Verdict::GuaranteedBounded);
  }
}
