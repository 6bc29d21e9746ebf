#include "hypoou/errors.hpp"
#include "hypoou/kernel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hypoou;

TEST(Kernel, KolmogorovValueAtUnitTime) {
  const DriftMatrix D = kolmogorov2d();
  const IdentityField id(1);
  const Point z0 = Point::origin(2);
  // (4π)^{-1} det(C0(1))^{-1/2} with det C0(1) = 1/12.
  const double g = gamma_eval(z0, Point(Vec::Zero(2), 1.0), id, D, KernelVariant::principal).value;
  EXPECT_NEAR(g, std::sqrt(12.0) / (4.0 * M_PI), 1e-13);
}

TEST(Kernel, VanishesForNonpositiveTime) {
  const DriftMatrix D = kolmogorov2d();
  const IdentityField id(1);
  EXPECT_EQ(gamma_eval(Point::origin(2), Point(Vec::Ones(2), -0.5), id, D, KernelVariant::full).value,
            0.0);
}

TEST(Kernel, Normalization) {
  Mat B3 = Mat::Zero(3, 3);
  B3(0, 2) = 1.0;
  B3(1, 1) = 0.4;
  B3(2, 2) = -0.2;
  for (const DriftMatrix& D : {kolmogorov2d(), validate_structure(B3, {2, 1})}) {
    const OscillatingField f(D.p0(), D.N(), 2.0, 3.0);
    const FrozenKernel k(Point(Vec::Constant(D.N(), 0.2), 0.0), f, D, KernelVariant::full);
    for (double t : {0.1, 1.0})
      EXPECT_NEAR(kernel_mass(k, t), std::exp(-t * D.traceB()), 1e-6 * std::exp(-t * D.traceB()));
  }
}

TEST(Kernel, PrincipalHomogeneity) {
  const DriftMatrix D = kolmogorov2d();
  const OscillatingField f(1, 2, 2.0, 3.0);
  const Point z0(Vec::Constant(2, 0.4), 0.0);
  const BlockStructure& s = D.structure();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ut(0.1, 1.0);
  for (int n = 0; n < 100; ++n) {
    const Point z(Vec{{u(rng), u(rng)}}, ut(rng));
    const KernelValue a = gamma_eval(z0, z, f, D, KernelVariant::principal);
    for (double lambda : {0.5, 2.0, 5.0}) {
      const KernelValue b = gamma_eval(z0, dilate(lambda, z, s), f, D, KernelVariant::principal);
      const double scale = std::pow(lambda, -s.Q());
      EXPECT_NEAR(b.value, scale * a.value, 1e-10 * std::abs(scale * a.value) + 1e-300);
      const double hscale = scale / (lambda * lambda);
      EXPECT_NEAR(b.hess(0, 0), hscale * a.hess(0, 0), 1e-10 * std::abs(hscale * a.hess(0, 0)) + 1e-300);
    }
  }
}

TEST(Kernel, ResidualIsSecondOrder) {
  const DriftMatrix D = kolmogorov2d();
  const IdentityField id(1);
  const Point z0 = Point::origin(2);
  const Point z(Vec{{0.3, -0.1}}, 0.6);
  const double a = pde_residual(z0, z, id, D, 1e-2), b = pde_residual(z0, z, id, D, 5e-3);
  EXPECT_NEAR(a / b, 4.0, 0.5);
}

TEST(Kernel, ResidualStepGuard) {
  const DriftMatrix D = kolmogorov2d();
  const IdentityField id(1);
  EXPECT_THROW(pde_residual(Point::origin(2), Point(Vec{{0.01, 0.0}}, 0.01), id, D, 0.1), StepTooLarge);
}

TEST(Kernel, MonteCarloRejectsFewPaths) {
  const DriftMatrix D = kolmogorov2d();
  const IdentityField id(1);
  EXPECT_THROW(mc_transition_density(Point::origin(2), Vec::Zero(2), 0.1, id, D, 10, 1), PathCountTooSmall);
}
