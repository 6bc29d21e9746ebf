#pragma once

// Sweeps for the uniform kernel bounds, the Lipschitz-type difference bounds
// and the covariance sandwich constants.

#include "hypoou/kernel.hpp"

#include <cstdint>
#include <vector>

namespace hypoou {

/// ζ = δ(ρ)θ with ρ log-spaced and θ on the unit sphere of the raw norm,
/// kept inside |t| ≤ 2T.
struct SweepSpec {
  std::vector<Point> z0Samples;
  int shells = 24;
  int directions = 24;
  double rhoMin = 1e-3;
  double rhoMax = 10.0;
  double T = 0.5;
  int order = 0;
  double excludeRadius = 1e-3;
  bool polish = true;
  std::uint64_t seed = 1;
};

struct ShellMax {
  double rho = 0.0;
  double value = 0.0;
};

struct BoundReport {
  double supConstant = 0.0;
  Point argmaxZ0, argmaxZeta;
  std::vector<ShellMax> perShellMax;
  std::vector<double> perZ0;
  double refinedSup = 0.0;
  double relChange = 0.0;
  bool stableUnderRefinement = false;
  /// Principal kernel over R^N x [-1,1]: its sup and the max/min ratio of the
  /// per-shell constants on shells where every direction is admissible.
  double principalSup = 0.0;
  double principalShellSpread = 0.0;
  double lambdaCtilde = 0.0, LambdaCtilde = 0.0;
  std::size_t samples = 0;
  /// Lipschitz sweep only: quotients with the admissibility constraint
  /// dropped, as the image point approaches the pole.
  std::vector<double> controlRadii;
  std::vector<double> controlQuotients;
};

/// ‖ζ‖^{Q+k}|∂^kγ(z0;ζ)| (max entry for k ≥ 1).
double bound_measure(const FrozenKernel& k, const Point& zeta, int order);

/// Sup of the measure over the sweep; rerun with doubled shell and direction
/// counts to fill refinedSup.
BoundReport kernel_bound_sweep(const SweepSpec& spec, const CoefficientField& field,
                               const DriftMatrix& D);

struct LipschitzSpec {
  std::vector<Point> z0Samples;
  int pairs = 2000;
  int order = 2;
  double M = 0.5;
  Box H;  // ζ.x must lie in [H.lo, H.hi]; time range is [-2T, 2T]
  double T = 0.5;
  double excludeRadius = 1e-3;
  double minSeparation = 1e-6;
  bool reflected = false;
  std::uint64_t seed = 1;
};

/// |∂^kγ(ζ∘v) - ∂^kγ(ζ)|·‖ζ‖^{Q+k+1}/‖v‖ over ζ = w⁻¹∘z, v = z⁻¹∘z̄ with
/// ‖v‖ ≤ M‖ζ‖. Throws NoAdmissibleTriples when sampling finds none.
BoundReport lipschitz_quotient_sweep(const LipschitzSpec& spec, const CoefficientField& field,
                                     const DriftMatrix& D);

struct Interval {
  double lo = 0.0, hi = 0.0;
};

struct SandwichReport {
  double Lambda = 1.0;
  double lambdaCtilde = 0.0, LambdaCtilde = 0.0;
  std::size_t samples = 0;
  /// ⟨C0(z0;1)y,y⟩/⟨C̃(1)y,y⟩ and det C0(z0;1)/det C̃(1).
  Interval covRatio, detRatio;
  std::size_t covViolations = 0, detViolations = 0;
  /// ⟨C0⁻¹(z0;t)x,x⟩/|D(1/√t)x|² against [1/(ΛΛ_C̃), Λ/λ_C̃].
  Interval scaledInverse, inverseEnvelope;
  std::size_t inverseViolations = 0;
  /// Measured constants over tGrid: C vs C̃, det C vs det C̃, C⁻¹ vs C0⁻¹.
  double Mcov = 1.0, Mdet = 1.0, Minv = 1.0;
  /// Smallest m bounding all three ratios per z0; its max over all z0 and over the first half.
  std::vector<double> mPerZ0;
  double m = 1.0, mFirstHalf = 1.0;
  /// Slope of log max|eig(C,C0) - 1| against log t; NaN when C ≡ C0.
  double deviationSlope = 0.0;
};

/// Throws NonPositiveTime unless every t > 0.
SandwichReport sandwich_report(const std::vector<double>& tGrid,
                               const std::vector<Point>& z0Samples,
                               const CoefficientField& field, const DriftMatrix& D,
                               std::size_t samples = 10000, std::uint64_t seed = 1);

/// Uniform points of [-R,R]^N x [-T,T].
std::vector<Point> sample_strip(int N, double R, double T, std::size_t count, std::uint64_t seed);

}  // namespace hypoou
