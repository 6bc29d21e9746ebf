#include "hypoou/covering.hpp"
#include "hypoou/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hypoou;

TEST(Covering, CountMatchesBruteForce) {
  const DriftMatrix D = kolmogorov2d();
  const Covering c(0.5, 4.0, 0.5, D.structure());
  const std::vector<Point> centers = c.centers(1.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.2, 0.2), ut(-0.5, 0.5);
  for (int n = 0; n < 5; ++n) {
    const Point z(Vec{{u(rng), u(rng)}}, ut(rng));
    const double radius = 0.5;
    std::int64_t brute = 0;
    for (const Point& ci : centers)
      if (quasidistance(z, ci, D) < radius) ++brute;
    EXPECT_EQ(c.count_within(z, radius, D), brute);
  }
}

TEST(Covering, CertifiedBoundHolds) {
  const DriftMatrix D = kolmogorov2d();
  const Covering c = build_covering({0.5, 1.0}, 0.25, 4.0, D);
  const CoverReport rep = verify_covering(c, {0.5, 1.0}, D, 500, 3);
  EXPECT_EQ(rep.coverageFraction, 1.0);
  EXPECT_GT(rep.certified, 0);
  EXPECT_LE(rep.maxOverlap, rep.certified);
}

TEST(Covering, RejectsBadInput) {
  const DriftMatrix D = kolmogorov2d();
  EXPECT_THROW(build_covering({0.5, 1.0}, 0.25, 1.0, D), ValidationError);
  EXPECT_THROW(build_covering({-0.5, 1.0}, 0.25, 4.0, D), ValidationError);
}
