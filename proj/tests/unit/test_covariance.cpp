#include "hypoou/covariance.hpp"
#include "hypoou/errors.hpp"
#include "hypoou/expm.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <random>

using namespace hypoou;

TEST(Expm, MatchesEigenReference) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (double scale : {1e-3, 0.1, 1.0, 4.0, 30.0}) {
    Mat A(5, 5);
    for (int k = 0; k < 25; ++k) A.data()[k] = scale * g(rng);
    const Mat ref = A.exp();
    EXPECT_LT((expm(A) - ref).norm() / ref.norm(), 1e-12) << "scale " << scale;
  }
}

TEST(Expm, Nilpotent) {
  Mat A = Mat::Zero(3, 3);
  A(1, 0) = 2.0;
  A(2, 1) = -1.5;
  EXPECT_LT((expm_nilpotent(A) - expm(A)).norm(), 1e-14);
}

TEST(Covariance, KolmogorovClosedForm) {
  const DriftMatrix D = kolmogorov2d();
  const Mat A0 = Mat::Identity(1, 1);
  for (double t : {0.1, 1.0, 2.0}) {
    Mat expected(2, 2);
    expected << t, -t * t / 2.0, -t * t / 2.0, t * t * t / 3.0;
    const Mat C0 = covariance(A0, t, D, CovKind::C0);
    EXPECT_LT(((C0 - expected).array() / expected.array()).abs().maxCoeff(), 1e-10);
    EXPECT_NEAR(C0.determinant(), std::pow(t, 4) / 12.0, 1e-10 * std::pow(t, 4) / 12.0);
    const Mat Cq = covariance_quadrature(A0, t, D, CovKind::C0);
    EXPECT_LT(((C0 - Cq).array() / expected.array()).abs().maxCoeff(), 1e-9);
  }
}

TEST(Covariance, GramMatchesQuadrature) {
  Mat M(3, 3);
  M << 0.2, 1.0, 0.0, -0.3, 0.1, 1.0, 0.5, 0.0, -0.4;
  Mat A = Mat::Zero(3, 3);
  A(0, 0) = 2.0;
  for (double t : {0.01, 0.5, 3.0}) {
    const Mat a = integrated_gram(M, A, t), b = integrated_gram_quadrature(M, A, t);
    EXPECT_LT((a - b).norm() / b.norm(), 1e-9);
  }
}

TEST(Covariance, ScalingLaw) {
  Mat B3 = Mat::Zero(3, 3);
  B3(0, 1) = 1.0;
  B3(1, 2) = 1.0;
  Mat B4 = Mat::Zero(4, 4);
  B4(0, 2) = 1.0;
  B4(1, 3) = 1.0;
  const std::vector<DriftMatrix> structures{kolmogorov2d(), validate_structure(B3, {1, 1, 1}),
                                            validate_structure(B4, {2, 2})};
  OscillatingField field(1, 2, 2.0, 3.0);
  for (const DriftMatrix& D : structures) {
    OscillatingField f(D.p0(), D.N(), 2.0, 3.0);
    const Point z0(Vec::Constant(D.N(), 0.3), 0.1);
    for (double t : {1e-3, 1e-2, 0.1, 1.0, 10.0})
      EXPECT_LT(scaling_check(z0, t, f, D), 1e-8) << "N=" << D.N() << " t=" << t;
  }
}

TEST(Covariance, Hypoellipticity) {
  const HypoellipticityReport ok = hypoellipticity_check(kolmogorov2d().B(), {1, 1});
  EXPECT_TRUE(ok.structural && ok.numerical && ok.agree);
  const HypoellipticityReport bad = hypoellipticity_check(Mat::Zero(2, 2), {1, 1});
  EXPECT_FALSE(bad.structural);
  EXPECT_FALSE(bad.numerical);
  EXPECT_TRUE(bad.agree);
}

TEST(Covariance, CholeskyRejectsIndefinite) {
  Mat C(2, 2);
  C << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(CholeskyFactor{C}, NotPositiveDefinite);
}
