#include "hypoou/bounds.hpp"
#include "hypoou/errors.hpp"

#include <gtest/gtest.h>

using namespace hypoou;

TEST(Bounds, PrincipalMeasureIsDilationInvariant) {
  const DriftMatrix D = kolmogorov2d();
  const OscillatingField f(1, 2, 2.0, 3.0);
  const FrozenKernel k(Point::origin(2), f, D, KernelVariant::principal);
  const Point zeta(Vec{{0.2, -0.05}}, 0.3);
  for (int order : {0, 1, 2}) {
    const double a = bound_measure(k, zeta, order);
    for (double lambda : {0.5, 2.0, 5.0})
      EXPECT_NEAR(bound_measure(k, dilate(lambda, zeta, D.structure()), order), a, 1e-10 * a);
  }
}

TEST(Bounds, SampleStripStaysInside) {
  const auto pts = sample_strip(3, 2.0, 0.5, 200, 4);
  ASSERT_EQ(pts.size(), 200u);
  for (const Point& p : pts) {
    EXPECT_LE(p.x.cwiseAbs().maxCoeff(), 2.0);
    EXPECT_LE(std::abs(p.t), 0.5);
  }
  EXPECT_EQ(sample_strip(3, 2.0, 0.5, 5, 4).front().x, pts.front().x);
}

TEST(Bounds, SandwichHasNoViolations) {
  const DriftMatrix D = kolmogorov2d();
  const OscillatingField f(1, 2, 1.2, 3.0);
  const SandwichReport s = sandwich_report({0.01, 0.1, 0.5}, sample_strip(2, 1.0, 0.5, 6, 1), f, D, 500);
  EXPECT_EQ(s.covViolations, 0u);
  EXPECT_EQ(s.detViolations, 0u);
  EXPECT_EQ(s.inverseViolations, 0u);
  EXPECT_LE(s.inverseEnvelope.lo, s.scaledInverse.lo);
  EXPECT_GE(s.inverseEnvelope.hi, s.scaledInverse.hi);
}

TEST(Bounds, SandwichRejectsNonpositiveTime) {
  const DriftMatrix D = kolmogorov2d();
  const IdentityField id(1);
  EXPECT_THROW(sandwich_report({0.0, 1.0}, {Point::origin(2)}, id, D), NonPositiveTime);
}

TEST(Bounds, LipschitzNeedsAdmissibleTriples) {
  const DriftMatrix D = kolmogorov2d();
  const IdentityField id(1);
  LipschitzSpec s;
  s.z0Samples = {Point::origin(2)};
  s.pairs = 50;
  s.M = 0.0;
  s.H.lo = Vec::Constant(2, -1.0);
  s.H.hi = Vec::Constant(2, 1.0);
  EXPECT_THROW(lipschitz_quotient_sweep(s, id, D), NoAdmissibleTriples);
}
