#pragma once

// Gaussian fundamental solution of the frozen operator and its principal part:
//   γ(z0; x, t) = (4π)^{-N/2} det C(t)^{-1/2} exp(-¼⟨C(t)⁻¹x, x⟩ - t TrB),  t > 0.

#include "hypoou/covariance.hpp"

#include <cstdint>
#include <vector>

namespace hypoou {

enum class KernelVariant { full, principal };

struct KernelValue {
  double value = 0.0;
  Vec grad;  // ∂_{x_j}γ, j < p0
  Mat hess;  // ∂²_{x_i x_j}γ, i, j < p0
};

/// γ(z0; ·) for a fixed frozen diffusion block A(z0).
class FrozenKernel {
 public:
  /// Everything needed to evaluate γ on the time slice t.
  struct Slice {
    double t = 0.0;
    Mat L;              // Cholesky factor of C(t)
    double logNorm = 0.0;  // log of (4π)^{-N/2} det C^{-1/2} e^{-t TrB}
    Mat CinvTop;        // leading p0×p0 block of C(t)⁻¹
  };

  FrozenKernel(DriftMatrix D, Mat A0, KernelVariant variant);
  FrozenKernel(const Point& z0, const CoefficientField& field, const DriftMatrix& D,
               KernelVariant variant);

  Slice slice(double t) const;
  KernelValue eval(const Slice& s, const Vec& x) const;
  double value(const Slice& s, const Vec& x) const;
  /// Returns zeros for t ≤ 0.
  KernelValue eval(const Point& z) const;

  const DriftMatrix& drift() const { return D_; }
  const Mat& A0() const { return A0_; }
  KernelVariant variant() const { return variant_; }
  int N() const { return D_.N(); }
  int p0() const { return D_.p0(); }
  /// TrB for the full variant, 0 for the principal one.
  double trace() const { return variant_ == KernelVariant::full ? D_.traceB() : 0.0; }
  /// Covariance of this variant at time t.
  Mat cov(double t) const;

 private:
  DriftMatrix D_;
  Mat A0_;
  KernelVariant variant_;
};

KernelValue gamma_eval(const Point& z0, const Point& z, const CoefficientField& field,
                       const DriftMatrix& D, KernelVariant variant);

/// Γ(z0; z, ζ) = γ(z0; ζ⁻¹∘z).
double fundamental_eval(const Point& z0, const Point& z, const Point& zeta,
                        const CoefficientField& field, const DriftMatrix& D);

/// ∫γ(z0;x,t)dx by tensor Gauss-Legendre over ±9 standard deviations of the
/// slice covariance. Equals e^{-t TrB} for the full variant.
double kernel_mass(const FrozenKernel& k, double t, int panels = 6, int nodes = 10);

/// |L_{z0}γ(z0;·)(z)| by central differences of step h (drift B0 for the
/// principal variant). Throws StepTooLarge if h > 0.1‖z‖.
double pde_residual(const Point& z0, const Point& z, const CoefficientField& field,
                    const DriftMatrix& D, double h, KernelVariant variant = KernelVariant::full);

struct McReport {
  std::int64_t paths = 0;
  int binsPerDim = 0;
  Vec lo, hi;                     // histogram range per dimension
  std::vector<double> empirical;  // densities, row-major over bins
  std::vector<double> analytic;   // bin-averaged densities
  double peak = 0.0;              // analytic density at the origin
  double supDiscrepancy = 0.0;    // max |empirical - analytic| / peak
  Vec sampleVariance;             // per-component variance of the increment
};

/// Exact Gaussian simulation of dX = BᵀX ds + √2σ dW (σσᵀ = A(z0)) from
/// x_start over time t. The increment w = x_start - E(t)X_t has density
/// γ(z0; w, t) e^{t TrB}; its histogram is compared against that density.
McReport mc_transition_density(const Point& z0, const Vec& x_start, double t,
                               const CoefficientField& field, const DriftMatrix& D,
                               std::int64_t paths, std::uint64_t seed, int binsPerDim = 24);

/// Least-squares slope of log var(w_k) against log t.
double mc_variance_slope(const Point& z0, const std::vector<double>& times, int component,
                         const CoefficientField& field, const DriftMatrix& D,
                         std::int64_t paths, std::uint64_t seed);

}  // namespace hypoou
