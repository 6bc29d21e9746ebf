#include "hypoou/errors.hpp"
#include "hypoou/kernel.hpp"
#include "hypoou/quadrature.hpp"
#include "hypoou/singular.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hypoou;

TEST(Cutoff, Profile) {
  EXPECT_DOUBLE_EQ(cutoff_profile(-0.1), 1.0);
  EXPECT_DOUBLE_EQ(cutoff_profile(0.0), 1.0);
  EXPECT_DOUBLE_EQ(cutoff_profile(0.5), 0.5);
  EXPECT_DOUBLE_EQ(cutoff_profile(1.0), 0.0);
  EXPECT_DOUBLE_EQ(cutoff_profile(2.0), 0.0);
}

TEST(Split, ReconstructsKernel) {
  const DriftMatrix D = kolmogorov2d();
  const OscillatingField f(1, 2, 2.0, 3.0);
  const CutoffSpec spec = CutoffSpec::make(0.5, D.structure());
  const Point z0 = Point::origin(2);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.6, 0.6), ut(0.0, 0.4);
  for (int n = 0; n < 200; ++n) {
    const Point w(Vec{{u(rng), u(rng) * u(rng)}}, ut(rng));
    const KernelSplit s = kernel_split(z0, w, 0, 0, f, D, spec);
    const double h = gamma_eval(z0, w, f, D, KernelVariant::full).hess(0, 0);
    EXPECT_NEAR(s.k0 + s.kinf, h, 1e-14 * std::abs(h) + 1e-300);
    const double g = gauge(w, spec.gauge, D.structure());
    if (g >= spec.rho0) EXPECT_EQ(s.k0, 0.0);
    if (g <= spec.rho0 / 2.0) EXPECT_EQ(s.kinf, 0.0);
  }
}

TEST(Cij, HeatEquationClosedForm) {
  // One variable, gauge |x| + |t|^{1/2}: the flux integral reduces to
  // ∫_0^∞ 2v/(1+v) e^{-v²/4} dv / √(4π).
  const DriftMatrix D = validate_structure(Mat::Zero(1, 1), {1});
  const IdentityField id(1);
  const double closed = adaptive_gauss_legendre(
      [](double v) { return 2.0 * v / (1.0 + v) * std::exp(-v * v / 4.0) / std::sqrt(4.0 * M_PI); },
      0.0, 40.0, 1e-14);
  EXPECT_NEAR(closed, 0.456369224172, 1e-11);
  const CijReport c = cij_constant(Point::origin(1), 0, 0, id, D);
  EXPECT_NEAR(c.value, closed, 1e-9);
}

TEST(Cij, SmoothGaugeEqualsCancellationIdentity) {
  // The cancellation integral down to r → 0 minus the slice-ordered k₀ mass
  // is the surface constant in the cutoff gauge.
  const DriftMatrix D = kolmogorov2d();
  const IdentityField id(1);
  const CutoffSpec spec = CutoffSpec::make(0.5, D.structure());
  const Point z0 = Point::origin(2);
  const SingularKernel k(z0, 0, 0, id, D, spec);
  const double K0 = k.cancellation_from({1e-6}).front();
  const CijReport c = cij_constant(z0, 0, 0, id, D, CijMesh::smooth(), &spec.gauge);
  // Both sides carry quadrature error of a few 1e-6 (the c mesh doubling
  // moves c by 7e-5 at the coarse level).
  EXPECT_NEAR(c.value, 0.4935981, 1e-5);
  EXPECT_NEAR(K0 - k.I0tot(), c.value, 1e-5);
}

TEST(Cancellation, PrincipalKolmogorovVanishes) {
  // B0 nilpotent: every slice of ∂²γ₀ integrates to zero and the shells are
  // dilation invariant, so the annulus integrals are zero.
  const DriftMatrix D = kolmogorov2d();
  const IdentityField id(1);
  const CutoffSpec spec = CutoffSpec::make(0.5, D.structure());
  for (double r1 : {1e-3, 1e-2, 1e-1})
    EXPECT_NEAR(cancellation_integral(Point::origin(2), 0, 0, r1, 0.25, D, id, spec), 0.0, 1e-8);
}
