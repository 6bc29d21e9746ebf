#pragma once

// The singular kernel ∂²_{ij}γ split by a gauge cutoff into k₀ (near the pole)
// and k∞, the constants c_ij, principal-value group convolutions, the
// cancellation integral over gauge shells and the representation check.
//
// Convolutions are evaluated slice by slice in the time lag τ: for each τ the
// spatial integral runs over y with ω = √2 L(τ) y, C(τ) = L Lᵀ, so the
// Gaussian factor is exp(-|y|²/2) whatever the anisotropy.

#include "hypoou/harness.hpp"
#include "hypoou/kernel.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace hypoou {

struct CutoffSpec {
  double rho0 = 0.5;
  GaugeSpec gauge;

  static CutoffSpec make(double rho0, const BlockStructure& s) {
    return {rho0, GaugeSpec::smooth_for(s)};
  }
};

/// 1 - (10u³ - 15u⁴ + 6u⁵) on [0,1], 1 below, 0 above.
double cutoff_profile(double u);

/// η(z): 1 for gauge ≤ ρ₀/2, 0 for gauge ≥ ρ₀.
double cutoff_eval(const CutoffSpec& spec, const Point& z, const BlockStructure& s);

struct KernelSplit {
  double k0 = 0.0;
  double kinf = 0.0;
};

KernelSplit kernel_split(const Point& z0, const Point& z, int i, int j,
                         const CoefficientField& field, const DriftMatrix& D,
                         const CutoffSpec& spec);

/// Quadrature resolution of the surface constant c_ij.
struct CijMesh {
  GaugeKind kind = GaugeKind::raw;
  int panels = 6;  // raw: panels per half axis, graded towards 0; smooth: per unit of y
  int nodes = 8;

  /// The smooth gauge has near-corners where the 2κ-norm switches terms.
  static CijMesh smooth() { return {GaugeKind::smooth, 12, 8}; }
};

struct CijReport {
  double value = 0.0;     // at the finer mesh
  double coarse = 0.0;    // at the given mesh
  double relChange = 0.0;
  GaugeKind kind = GaugeKind::raw;
  std::size_t nodes = 0;
};

/// c_ij = -∫_{N(ζ)=1} ∂_{x_i}γ₀ ν_j dσ, written over the slice t = 1 as
/// -2 ∫ ∂_{x_i}γ₀(v,1) ∂_{x_j}N(v,1) / N(v,1) dv. Evaluated at the mesh and at
/// twice its panel count; throws MeshTooCoarse if they differ by more than 5%.
CijReport cij_constant(const Point& z0, int i, int j, const CoefficientField& field,
                       const DriftMatrix& D, const CijMesh& mesh = {},
                       const GaugeSpec* gauge = nullptr);

/// Quadrature resolution of the slice convolutions.
struct ConvGrid {
  int yNodes = 5;            // nodes per y panel
  double yRadius = 8.0;      // y cube half width
  double yPanelWidth = 2.0;  // target panel width in y
  int tauNodes = 6;          // nodes per τ panel
  double tauFirst = 1e-6;    // first τ panel, in units of ρ₀²
  double tauRatio = 2.0;     // geometric growth of τ panels
  double horizon = 1.0;      // largest τ for the k∞ part
};

/// Resolution of the shell integrals.
struct ShellGrid {
  int sNodes = 8;
  int yNodes = 12;
  double yRadius = 8.0;
  double yPanelWidth = 1.0;
  // The k₀ mass integrand carries log N(v,1), whose level sets have sharp
  // corners for the smooth gauge, so it gets a finer v rule.
  int massNodes = 12;
  double massPanelWidth = 0.5;
};

enum class KernelPart { k0, kinf, full, k0Reflected };

/// A compactly supported scalar function of (x, t).
struct Source {
  std::function<double(const Point&)> f;
  Box support;
};

Source source_of(const TestFunction& u);
/// L_{z0}u with the frozen diffusion block A0 and the full drift.
Source operator_image(const TestFunction& u, const Mat& A0, const DriftMatrix& D);

/// Slice sums at one point z. Sdiff = ∫dτ [S(τ) - f(z) e^{τTrB} I0(τ)] for the
/// k₀ part; S* are the plain slice-ordered integrals.
struct SlicePass {
  double fz = 0.0;
  double k0Diff = 0.0;
  double k0 = 0.0;
  double kinf = 0.0;
  std::size_t evaluations = 0;
};

class SingularKernel {
 public:
  SingularKernel(const Point& z0, int i, int j, const CoefficientField& field,
                 const DriftMatrix& D, CutoffSpec spec, ConvGrid grid = {},
                 ShellGrid shells = {});

  double k0(const Point& w) const;
  double kinf(const Point& w) const;
  /// k₀(w⁻¹).
  double k0_reflected(const Point& w) const;
  double hessian(const Point& w) const;

  /// ∫_{r1 ≤ N(w) ≤ r2} k₀(w) dw (or of k₀(w⁻¹)).
  double cancellation(double r1, double r2, bool reflected = false) const;
  /// Cancellation integral from each r in `radii` (any order) up to ρ₀.
  std::vector<double> cancellation_from(const std::vector<double>& radii,
                                        bool reflected = false) const;

  /// ∫dτ I0(τ), I0(τ) = ∫dω k₀(ω,τ) (slice-ordered mass of k₀). Since every
  /// slice of ∂²γ has zero mass this equals -∫_{τ≤ρ₀²}(1-η)∂²γ, which is
  /// absolutely convergent and is integrated in gauge-shell coordinates.
  double I0tot() const;
  /// The same total summed over the τ grid of the slice passes.
  double I0tot_nodes() const;
  /// ∫dτ (e^{τTrB} - 1) I0(τ).
  double J0() const;

  /// Slice sums for f at z; reflected uses k₀(w⁻¹) and skips k∞.
  SlicePass pass(const Source& f, const Point& z, bool reflected = false) const;

  const Point& z0() const { return z0_; }
  int i() const { return i_; }
  int j() const { return j_; }
  const CutoffSpec& cutoff() const { return spec_; }
  const ConvGrid& grid() const { return grid_; }
  const DriftMatrix& drift() const { return gamma_.drift(); }
  const FrozenKernel& gamma() const { return gamma_; }
  /// Smallest PV radius the τ grid resolves.
  double min_eps() const;

 private:
  struct Node {
    double tau, w;
    FrozenKernel::Slice slice;
    Mat gradMap;     // √2 (L⁻ᵀ) first p0 rows: C⁻¹ω = gradMap·y for ω = √2Ly
    Mat sqrt2L;      // √2 L
    Mat yMap;        // (√2 L)⁻¹
    Mat Eneg, Epos;  // E(-τ), E(τ)
    double jac = 0.0;  // 2^{N/2} det L
    double I0 = 0.0;
  };

  double kernel_at(const Node& n, const Vec& y, const Vec& omega, double& eta) const;
  double shell_integral(double r1, double r2, bool reflected) const;
  void build_nodes() const;
  double shell_mass() const;

  Point z0_;
  int i_, j_;
  FrozenKernel gamma_;
  CutoffSpec spec_;
  ConvGrid grid_;
  ShellGrid shells_;
  mutable std::once_flag nodesOnce_, massOnce_;
  mutable std::vector<Node> nodes_;
  mutable double I0nodes_ = 0.0;
  mutable double J0_ = 0.0;
  mutable double I0tot_ = 0.0;
  mutable std::mutex cacheMutex_;
  mutable std::map<std::pair<double, bool>, double> cancelCache_;
};

/// Truncated group convolution (f∗k)(z) = ∫ f(z∘w⁻¹) k(w) e^{τTrB} dw. With pv
/// the k₀ parts are principal values: only the cancellation term
/// ∫_{eps ≤ N(w) ≤ ρ₀} k₀ depends on eps; throws EpsTooSmallForGrid below
/// the grid resolution. Without pv the k₀ parts are slice-ordered integrals.
double group_convolve(const Source& f, const SingularKernel& k, KernelPart part, const Point& z,
                      bool pv, double eps);

/// Cancellation integral ∫_{r1 ≤ N(w) ≤ r2} k₀(z0; w) dw in the cutoff gauge.
double cancellation_integral(const Point& z0, int i, int j, double r1, double r2,
                             const DriftMatrix& D, const CoefficientField& field,
                             const CutoffSpec& spec, ShellGrid shells = {});

struct HReport {
  double h = 0.0, hstar = 0.0;
  double h1 = 0.0, h2 = 0.0, h3 = 0.0;
  double h1star = 0.0, h2star = 0.0, h3star = 0.0;
  std::vector<double> truncated;      // h along rseq
  std::vector<double> truncatedStar;  // h* along rseq
};

/// h = a(z)·PV(b∗k₀)(z) and h* = b(z)·PV(a∗k̃₀)(z), k̃₀(w) = k₀(w⁻¹), with
/// h = h1 + h2 + h3 (oscillation, modular factor, cancellation). Limits are
/// extrapolated from the truncations at rseq; throws NoConvergence if those
/// are not Cauchy.
HReport h_functions(const SingularKernel& k, const Point& z, const TestFunction& a,
                    const TestFunction& b, const std::vector<double>& rseq);

struct HolderReport {
  double maxQuotient = 0.0;
  double meanQuotient = 0.0;
  std::size_t pairs = 0;
};

/// |Δ(h - h*)| / ‖z⁻¹∘z̄‖ over `pairs` random nearby pairs in the support of a.
HolderReport h_difference_quotient(const SingularKernel& k, const TestFunction& a,
                                   const TestFunction& b, const std::vector<double>& rseq,
                                   int pairs, std::uint64_t seed);

struct ReprGrid {
  int panels = 2;
  int nodes = 5;
  double boxFraction = 0.6;  // evaluation box relative to the support box
};

struct ReprReport {
  double relL2Error = 0.0;
  double maxAbsError = 0.0;
  double cij = 0.0;
  double K = 0.0;  // cancellation term at eps
  double I0tot = 0.0;
  double eps = 0.0;
  std::size_t points = 0;
  std::size_t evaluations = 0;
};

/// Compares -PV(L_{z0}u ∗ k₀) - L_{z0}u ∗ k∞ + c_ij L_{z0}u with ∂²_{ij}u on a
/// tensor grid over the support of u. c_ij is taken in the cutoff gauge.
ReprReport representation_check(const TestFunction& u, const SingularKernel& k, double eps,
                                const ReprGrid& grid = {});

}  // namespace hypoou
