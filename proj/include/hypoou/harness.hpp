#pragma once

// Test functions with analytic derivatives, the operator L applied to them,
// Lᵖ norms on tensor Gauss-Legendre tiles and the a priori ratio experiments.

#include "hypoou/algebra.hpp"
#include "hypoou/field.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hypoou {

/// Value and derivatives of a function of (x, t).
struct Jet {
  double value = 0.0;
  Vec grad;  // ∂_{x_k}, all k
  Mat hess;  // ∂²_{x_k x_l}, all k, l
  double dt = 0.0;
};

class TestFunction {
 public:
  virtual ~TestFunction() = default;
  virtual Jet jet(const Point& z) const = 0;
  virtual double value(const Point& z) const { return jet(z).value; }
  /// Box outside which the function vanishes (or is below 1e-12 of its peak).
  virtual Box support() const = 0;
  virtual int N() const = 0;
  virtual std::string describe() const = 0;
};

using TestFunctionPtr = std::shared_ptr<const TestFunction>;

enum class BumpKind { gaussianBump, polynomialBump, anisotropicBump };

/// Shape of one coordinate factor.
enum class Profile { gaussian, polynomial, flat };

/// Product of one-dimensional profiles: exp(-s²) truncated where it drops
/// below 1e-12, or (1 - s²)⁴ on |s| ≤ 1, with s = (x - c)/w.
class ProductBump final : public TestFunction {
 public:
  ProductBump(Point center, Vec widths, std::vector<Profile> profiles, double amplitude = 1.0);

  /// Kind-based constructor. widths has N+1 entries (last one for t); for
  /// anisotropicBump the widths are base_j σ^{q_j} and base_t σ².
  static ProductBump make(BumpKind kind, const Point& center, const Vec& widths,
                          const BlockStructure& s, double sigma = 1.0);
  /// u(x) ψ(t) with ψ(t) = (1 - (t/T)²)⁴; pass a flat time profile for u alone.
  static ProductBump lift(const ProductBump& spatial, double T);

  Jet jet(const Point& z) const override;
  double value(const Point& z) const override;
  Box support() const override;
  int N() const override { return static_cast<int>(center_.x.size()); }
  std::string describe() const override;

  ProductBump scaled(double a) const;
  const Vec& widths() const { return widths_; }
  const Point& center() const { return center_; }

 private:
  Point center_;
  Vec widths_;
  std::vector<Profile> profiles_;
  double amplitude_;
};

/// v(z) = u(g∘z): a left translate. Spatial derivatives pass through,
/// ∂_t v = ∂_t u + ∇u·(-Bᵀ E(t) x_g).
class TranslatedFunction final : public TestFunction {
 public:
  TranslatedFunction(TestFunctionPtr base, Point g, DriftMatrix D);
  Jet jet(const Point& z) const override;
  double value(const Point& z) const override;
  Box support() const override;
  int N() const override { return base_->N(); }
  std::string describe() const override { return "translate of " + base_->describe(); }

 private:
  TestFunctionPtr base_;
  Point g_;
  DriftMatrix D_;
};

enum class OperatorMode { evolutionL, stationaryA };

/// Σ_{i,j<p0} a_ij ∂²_ij u + ⟨x, B∇u⟩ - ∂_t u (the time term only in evolution mode).
double apply_operator(const Jet& u, const Mat& A, const Mat& B, const Vec& x, OperatorMode mode);
double apply_operator(const TestFunction& u, const CoefficientField& field, const DriftMatrix& D,
                      OperatorMode mode, const Point& z);

/// (Σ w|v|^p)^{1/p}; throws BadExponent unless 1 < p < ∞.
double lp_norm(const std::vector<double>& values, const std::vector<double>& weights, double p);

/// Tensor Gauss-Legendre tiling of a box: `panels` per axis with `nodes` each.
struct TileGrid {
  int panels = 4;
  int nodes = 6;
};

struct LpReport {
  double p = 2.0;
  Mat d2;  // ‖∂²_{ij}u‖_p, i, j < p0
  double Lu = 0.0;
  double u = 0.0;
  double drift = 0.0;
  double ratio = 0.0;
  std::size_t samples = 0;
};

/// Σ_{i,j<p0}‖∂²_{ij}u‖_p / (‖Lu‖_p + ‖u‖_p) over the strip.
LpReport strip_ratio(const TestFunction& u, const CoefficientField& field, const DriftMatrix& D,
                     double p, const TileGrid& grid = {});
std::vector<LpReport> strip_ratios(const TestFunction& u, const CoefficientField& field,
                                   const DriftMatrix& D, const std::vector<double>& ps,
                                   const TileGrid& grid = {});

struct StationaryReport {
  double p = 2.0;
  double secondDerivRatio = 0.0;  // Σ‖∂²_{ij}u‖ / (‖𝒜u‖ + ‖u‖) on R^N
  double driftRatio = 0.0;        // ‖⟨x,B∇u⟩‖ / (‖𝒜u‖ + ‖u‖) on R^N
  double liftRatio = 0.0;         // strip ratio of U = uψ
  double Au = 0.0, u = 0.0, drift = 0.0, d2sum = 0.0;
};

/// Ratios for a time-independent problem, through U(x,t) = u(x)ψ(t).
StationaryReport stationary_ratio(const ProductBump& spatial, double T,
                                  const CoefficientField& field, const DriftMatrix& D, double p,
                                  const TileGrid& grid = {});

/// Family of `count` bumps with spatial widths base·σ, σ log-spaced over
/// [1/4, 4]. Doubling count inserts the midpoints of the previous family.
std::vector<ProductBump> bump_family(const Vec& baseWidths, double T, int count);

/// Smallest c with ‖∂_m u‖ ≤ ε‖∂²_{mm}u‖ + (c/ε)‖u‖ for every ε given.
double interpolation_constant(const TestFunction& u, int m, double p,
                              const std::vector<double>& eps, const TileGrid& grid = {});

}  // namespace hypoou
