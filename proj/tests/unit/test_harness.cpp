#include "hypoou/errors.hpp"
#include "hypoou/harness.hpp"

#include <gtest/gtest.h>

using namespace hypoou;

namespace {

ProductBump bump(const DriftMatrix& D, double scale = 1.0) {
  const ProductBump b = ProductBump::make(BumpKind::polynomialBump, Point::origin(D.N()),
                                          Vec::Constant(D.N() + 1, 0.3), D.structure());
  return b.scaled(scale);
}

}  // namespace

TEST(Harness, LpNormRejectsBadExponent) {
  EXPECT_THROW(lp_norm({1.0}, {1.0}, 1.0), BadExponent);
  EXPECT_THROW(lp_norm({1.0}, {1.0}, INFINITY), BadExponent);
  EXPECT_NEAR(lp_norm({3.0, 4.0}, {1.0, 1.0}, 2.0), 5.0, 1e-15);
}

TEST(Harness, JetMatchesFiniteDifferences) {
  const DriftMatrix D = kolmogorov2d();
  const ProductBump u = ProductBump::make(BumpKind::gaussianBump, Point::origin(2),
                                          Vec::Constant(3, 0.5), D.structure());
  const Point z(Vec{{0.1, -0.2}}, 0.05);
  const Jet j = u.jet(z);
  const double h = 1e-5;
  for (int k = 0; k < 2; ++k) {
    Point a = z, b = z;
    a.x(k) += h;
    b.x(k) -= h;
    EXPECT_NEAR(j.grad(k), (u.value(a) - u.value(b)) / (2 * h), 1e-7);
  }
  Point a = z, b = z;
  a.t += h;
  b.t -= h;
  EXPECT_NEAR(j.dt, (u.value(a) - u.value(b)) / (2 * h), 1e-7);
}

TEST(Harness, StripRatioScaleInvariant) {
  const DriftMatrix D = kolmogorov2d();
  const OscillatingField f(1, 2, 2.0, 3.0);
  const auto a = strip_ratios(bump(D), f, D, {1.5, 2.0, 4.0});
  const auto b = strip_ratios(bump(D, 5.0), f, D, {1.5, 2.0, 4.0});
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k].ratio, b[k].ratio, 1e-12 * a[k].ratio);
}

TEST(Harness, FamilyDoublingKeepsMembers) {
  const Vec base = Vec::Constant(3, 0.2);
  const auto small = bump_family(base, 0.5, 5);
  const auto big = bump_family(base, 0.5, 10);
  for (std::size_t m = 0; m < small.size(); ++m)
    EXPECT_LT((small[m].widths() - big[2 * m].widths()).norm(), 1e-14);
}

TEST(Harness, InterpolationInequality) {
  const DriftMatrix D = kolmogorov2d();
  const ProductBump u = bump(D);
  const double c = interpolation_constant(u, 0, 2.0, {0.1, 1.0, 10.0});
  EXPECT_TRUE(std::isfinite(c));
  EXPECT_GE(c, 0.0);
}
