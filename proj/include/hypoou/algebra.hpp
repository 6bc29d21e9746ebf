#pragma once

// Block structure of the drift, anisotropic dilations, homogeneous norms and
// the translation group (x,t)∘(ξ,τ) = (ξ + E(τ)x, t + τ), E(τ) = exp(-τBᵀ).

#include "hypoou/types.hpp"

#include <vector>

namespace hypoou {

class BlockStructure {
 public:
  /// Throws BlockSizeError unless blocks are nonincreasing and positive.
  explicit BlockStructure(std::vector<int> blocks);

  const std::vector<int>& blocks() const { return blocks_; }
  int N() const { return N_; }
  int r() const { return static_cast<int>(blocks_.size()) - 1; }
  int p0() const { return blocks_.front(); }
  /// Dilation exponent of every coordinate: 1 on block 0, 3 on block 1, ...
  const std::vector<int>& q() const { return q_; }
  int Q() const { return Q_; }
  int Qt() const { return Q_ + 2; }
  /// Index of the first coordinate of block j.
  int offset(int j) const { return offsets_[j]; }

 private:
  std::vector<int> blocks_;
  std::vector<int> q_;
  std::vector<int> offsets_;
  int N_ = 0;
  int Q_ = 0;
};

/// The drift matrix B with its principal part B0 (only the blocks B_j kept).
class DriftMatrix {
 public:
  DriftMatrix(Mat B, BlockStructure s, Mat B0);

  const Mat& B() const { return B_; }
  const Mat& B0() const { return B0_; }
  const BlockStructure& structure() const { return s_; }
  double traceB() const { return traceB_; }
  int N() const { return s_.N(); }
  int p0() const { return s_.p0(); }
  /// True when B has no ∗ entries, so B = B0 is nilpotent.
  bool is_principal() const { return principal_; }

  /// E(s) = exp(-s Bᵀ).
  Mat E(double s) const;
  /// E0(s) = exp(-s B0ᵀ); polynomial in s.
  Mat E0(double s) const;

 private:
  Mat B_;
  BlockStructure s_;
  Mat B0_;
  double traceB_;
  bool principal_;
};

enum class DilationMode { space, spacetime };
enum class GaugeKind { raw, smooth };

struct GaugeSpec {
  int kappa = 2;
  GaugeKind kind = GaugeKind::smooth;

  /// κ = 2·lcm({q_j} ∪ {2}).
  static GaugeSpec smooth_for(const BlockStructure& s);
  static GaugeSpec raw_for(const BlockStructure& s);
};

/// Checks (B): block sizes, rank of every B_j, zeros right of the B_j.
DriftMatrix validate_structure(const Mat& B, const std::vector<int>& blocks);

/// B with every ∗ block zeroed.
Mat principal_part(const DriftMatrix& D);

/// D(λ) (length N) or δ(λ) (length N+1) as a diagonal.
Eigen::DiagonalMatrix<double, Eigen::Dynamic> dilation_matrix(double lambda, DilationMode mode,
                                                              const BlockStructure& s);

/// δ(λ)z.
Point dilate(double lambda, const Point& z, const BlockStructure& s);

/// ‖(x,t)‖ = Σ|x_j|^{1/q_j} + |t|^{1/2}.
double hom_norm(const Point& z, const BlockStructure& s);

/// N_κ(z) = (Σ|x_j|^{2κ/q_j} + |t|^κ)^{1/(2κ)}, evaluated without overflow.
double smooth_gauge(const Point& z, const GaugeSpec& g, const BlockStructure& s);

/// hom_norm or smooth_gauge depending on g.kind.
double gauge(const Point& z, const GaugeSpec& g, const BlockStructure& s);

/// Spatial gradient of the gauge (zero components where it is not defined).
Vec gauge_grad_x(const Point& z, const GaugeSpec& g, const BlockStructure& s);

Point group_compose(const Point& z, const Point& w, const DriftMatrix& D);
Point group_inverse(const Point& z, const DriftMatrix& D);

/// d(z,ζ) = ‖ζ⁻¹∘z‖.
double quasidistance(const Point& z, const Point& zeta, const DriftMatrix& D);

/// KOLM2D: N = 2, blocks [1,1], B = [[0,1],[0,0]].
DriftMatrix kolmogorov2d();

}  // namespace hypoou
