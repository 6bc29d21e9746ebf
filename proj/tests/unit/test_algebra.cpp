#include "hypoou/algebra.hpp"
#include "hypoou/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hypoou;

namespace {

DriftMatrix three_block() {
  // N = 4, blocks [2, 1, 1] with a lower-order drift entry.
  Mat B = Mat::Zero(4, 4);
  B(0, 2) = 1.0;
  B(2, 3) = 1.0;
  B(1, 1) = 0.3;
  return validate_structure(B, {2, 1, 1});
}

Point random_point(std::mt19937_64& rng, int N) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec x(N);
  for (int k = 0; k < N; ++k) x(k) = u(rng);
  return {x, u(rng)};
}

void expect_near(const Point& a, const Point& b, double tol) {
  EXPECT_NEAR((a.x - b.x).norm(), 0.0, tol);
  EXPECT_NEAR(a.t, b.t, tol);
}

}  // namespace

TEST(Structure, DilationExponents) {
  const BlockStructure s({2, 1, 1});
  EXPECT_EQ(s.q(), (std::vector<int>{1, 1, 3, 5}));
  EXPECT_EQ(s.Q(), 10);
  EXPECT_EQ(s.Qt(), 12);
  EXPECT_EQ(GaugeSpec::smooth_for(s).kappa, 60);
  EXPECT_EQ(GaugeSpec::smooth_for(BlockStructure({1, 1})).kappa, 12);
}

TEST(Structure, RejectsIncreasingBlocks) {
  EXPECT_THROW(BlockStructure({1, 2}), BlockSizeError);
  Mat B = Mat::Zero(3, 3);
  EXPECT_THROW(validate_structure(B, {1, 2}), ValidationError);
}

TEST(Structure, RejectsRankDeficientBlock) {
  EXPECT_THROW(validate_structure(Mat::Zero(2, 2), {1, 1}), ValidationError);
}

TEST(Structure, PrincipalPart) {
  const DriftMatrix D = three_block();
  EXPECT_FALSE(D.is_principal());
  EXPECT_DOUBLE_EQ(D.B0()(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(D.B0()(0, 2), 1.0);
  EXPECT_TRUE(kolmogorov2d().is_principal());
}

TEST(Group, KolmogorovTranslation) {
  const DriftMatrix D = kolmogorov2d();
  Mat expected(2, 2);
  expected << 1.0, 0.0, -2.0, 1.0;
  EXPECT_LT((D.E(2.0) - expected).norm(), 1e-14);
}

TEST(Group, Axioms) {
  std::mt19937_64 rng(7);
  for (const DriftMatrix& D : {kolmogorov2d(), three_block()}) {
    const Point e = Point::origin(D.N());
    for (int n = 0; n < 50; ++n) {
      const Point a = random_point(rng, D.N()), b = random_point(rng, D.N()),
                  c = random_point(rng, D.N());
      expect_near(group_compose(group_compose(a, b, D), c, D),
                  group_compose(a, group_compose(b, c, D), D), 1e-12);
      expect_near(group_compose(a, e, D), a, 1e-15);
      expect_near(group_compose(e, a, D), a, 1e-15);
      expect_near(group_compose(a, group_inverse(a, D), D), e, 1e-13);
      expect_near(group_compose(group_inverse(a, D), a, D), e, 1e-13);
    }
  }
}

TEST(Gauge, Homogeneity) {
  std::mt19937_64 rng(11);
  const BlockStructure s({2, 1, 1});
  const GaugeSpec g = GaugeSpec::smooth_for(s);
  for (int n = 0; n < 100; ++n) {
    const Point z = random_point(rng, 4);
    for (double lambda : {0.5, 2.0, 5.0}) {
      const Point w = dilate(lambda, z, s);
      EXPECT_NEAR(hom_norm(w, s), lambda * hom_norm(z, s), 1e-12 * lambda * hom_norm(z, s));
      EXPECT_NEAR(smooth_gauge(w, g, s), lambda * smooth_gauge(z, g, s),
                  1e-12 * lambda * smooth_gauge(z, g, s));
    }
  }
}

TEST(Gauge, SmoothGaugeNoOverflow) {
  const BlockStructure s({1, 1});
  const GaugeSpec g = GaugeSpec::smooth_for(s);
  const Point big(Vec::Constant(2, 1e30), 1e40);
  EXPECT_TRUE(std::isfinite(smooth_gauge(big, g, s)));
  EXPECT_DOUBLE_EQ(smooth_gauge(Point::origin(2), g, s), 0.0);
}

TEST(Gauge, QuasidistanceVanishesOnDiagonal) {
  const DriftMatrix D = three_block();
  std::mt19937_64 rng(3);
  const Point z = random_point(rng, 4);
  EXPECT_NEAR(quasidistance(z, z, D), 0.0, 1e-7);
}
