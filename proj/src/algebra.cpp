#include "hypoou/algebra.hpp"

#include "hypoou/errors.hpp"
#include "hypoou/expm.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numeric>
#include <sstream>

namespace hypoou {

BlockStructure::BlockStructure(std::vector<int> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw BlockSizeError("block list is empty");
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    if (blocks_[j] < 1) throw BlockSizeError("block sizes must be at least 1");
    if (j > 0 && blocks_[j] > blocks_[j - 1]) {
      std::ostringstream os;
      os << "block sizes must be nonincreasing (p" << j - 1 << "=" << blocks_[j - 1] << " < p" << j
         << "=" << blocks_[j] << ")";
      throw BlockSizeError(os.str());
    }
  }
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    offsets_.push_back(N_);
    N_ += blocks_[j];
    Q_ += static_cast<int>(2 * j + 1) * blocks_[j];
    q_.insert(q_.end(), blocks_[j], static_cast<int>(2 * j + 1));
  }
  offsets_.push_back(N_);
}

DriftMatrix::DriftMatrix(Mat B, BlockStructure s, Mat B0)
    : B_(std::move(B)), s_(std::move(s)), B0_(std::move(B0)) {
  traceB_ = B_.trace();
  principal_ = (B_ - B0_).cwiseAbs().maxCoeff() == 0.0;
}

Mat DriftMatrix::E(double s) const {
  if (principal_) return expm_nilpotent((-s) * B_.transpose());
  return expm((-s) * B_.transpose());
}

Mat DriftMatrix::E0(double s) const { return expm_nilpotent((-s) * B0_.transpose()); }

GaugeSpec GaugeSpec::smooth_for(const BlockStructure& s) {
  int l = 2;
  for (int q : s.q()) l = std::lcm(l, q);
  return {2 * l, GaugeKind::smooth};
}

GaugeSpec GaugeSpec::raw_for(const BlockStructure& s) {
  GaugeSpec g = smooth_for(s);
  g.kind = GaugeKind::raw;
  return g;
}

DriftMatrix validate_structure(const Mat& B, const std::vector<int>& blocks) {
  BlockStructure s(blocks);
  if (B.rows() != s.N() || B.cols() != s.N()) {
    std::ostringstream os;
    os << "sum of blocks is " << s.N() << " but B is " << B.rows() << "x" << B.cols();
    throw BlockSizeError(os.str());
  }
  if (!B.allFinite()) throw StructureError("B has non-finite entries");
  Mat B0 = Mat::Zero(s.N(), s.N());
  for (int j = 1; j <= s.r(); ++j) {
    const int r0 = s.offset(j - 1), c0 = s.offset(j);
    const int pr = s.blocks()[j - 1], pc = s.blocks()[j];
    const Mat Bj = B.block(r0, c0, pr, pc);
    Eigen::JacobiSVD<Mat> svd(Bj);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (smax > 0.0 && sv[k] > 1e-10 * smax) ++rank;
    if (rank != pc) {
      std::ostringstream os;
      os << "block B_" << j << " (" << pr << "x" << pc << ") has rank " << rank << ", expected "
         << pc;
      throw RankError(os.str());
    }
    B0.block(r0, c0, pr, pc) = Bj;
    // Everything right of B_j in these rows must vanish.
    const int right = s.offset(j + 1);
    if (right < s.N() && B.block(r0, right, pr, s.N() - right).cwiseAbs().maxCoeff() != 0.0) {
      std::ostringstream os;
      os << "nonzero entries right of block B_" << j;
      throw StructureError(os.str());
    }
  }
  return DriftMatrix(B, s, B0);
}

Mat principal_part(const DriftMatrix& D) { return D.B0(); }

Eigen::DiagonalMatrix<double, Eigen::Dynamic> dilation_matrix(double lambda, DilationMode mode,
                                                              const BlockStructure& s) {
  if (!(lambda > 0.0)) throw NonPositiveLambda("dilation factor must be positive");
  const int n = s.N() + (mode == DilationMode::spacetime ? 1 : 0);
  Vec d(n);
  for (int k = 0; k < s.N(); ++k) d[k] = std::pow(lambda, s.q()[k]);
  if (mode == DilationMode::spacetime) d[s.N()] = lambda * lambda;
  return Eigen::DiagonalMatrix<double, Eigen::Dynamic>(d);
}

Point dilate(double lambda, const Point& z, const BlockStructure& s) {
  return {dilation_matrix(lambda, DilationMode::space, s) * z.x, lambda * lambda * z.t};
}

double hom_norm(const Point& z, const BlockStructure& s) {
  double n = std::sqrt(std::abs(z.t));
  for (int k = 0; k < s.N(); ++k) {
    const double a = std::abs(z.x[k]);
    n += s.q()[k] == 1 ? a : std::pow(a, 1.0 / s.q()[k]);
  }
  return n;
}

namespace {

// a_j = |x_j|^{1/q_j}, last entry |t|^{1/2}: the gauge is the 2κ-norm of a.
Vec homogeneous_parts(const Point& z, const BlockStructure& s) {
  Vec a(s.N() + 1);
  for (int k = 0; k < s.N(); ++k) {
    const double v = std::abs(z.x[k]);
    a[k] = s.q()[k] == 1 ? v : std::pow(v, 1.0 / s.q()[k]);
  }
  a[s.N()] = std::sqrt(std::abs(z.t));
  return a;
}

}  // namespace

double smooth_gauge(const Point& z, const GaugeSpec& g, const BlockStructure& s) {
  const Vec a = homogeneous_parts(z, s);
  const double m = a.maxCoeff();
  if (m == 0.0) return 0.0;
  const double p = 2.0 * g.kappa;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) sum += std::pow(a[k] / m, p);
  return m * std::pow(sum, 1.0 / p);
}

double gauge(const Point& z, const GaugeSpec& g, const BlockStructure& s) {
  return g.kind == GaugeKind::raw ? hom_norm(z, s) : smooth_gauge(z, g, s);
}

Vec gauge_grad_x(const Point& z, const GaugeSpec& g, const BlockStructure& s) {
  Vec grad = Vec::Zero(s.N());
  if (g.kind == GaugeKind::raw) {
    for (int k = 0; k < s.N(); ++k) {
      const double v = z.x[k];
      if (v == 0.0) continue;
      const double q = s.q()[k];
      grad[k] = std::copysign(std::pow(std::abs(v), 1.0 / q - 1.0) / q, v);
    }
    return grad;
  }
  const double n = smooth_gauge(z, g, s);
  if (n == 0.0) return grad;
  const Vec a = homogeneous_parts(z, s);
  const double p = 2.0 * g.kappa;
  // ∂_k N = (a_k/N)^{2κ} · N / (q_k x_k)
  for (int k = 0; k < s.N(); ++k) {
    if (z.x[k] == 0.0) continue;
    grad[k] = std::pow(a[k] / n, p) * n / (s.q()[k] * z.x[k]);
  }
  return grad;
}

Point group_compose(const Point& z, const Point& w, const DriftMatrix& D) {
  return {w.x + D.E(w.t) * z.x, z.t + w.t};
}

Point group_inverse(const Point& z, const DriftMatrix& D) {
  return {-(D.E(-z.t) * z.x), -z.t};
}

double quasidistance(const Point& z, const Point& zeta, const DriftMatrix& D) {
  // ζ⁻¹∘z = (x - E(t-τ)ξ, t-τ)
  const double dt = z.t - zeta.t;
  return hom_norm(Point(z.x - D.E(dt) * zeta.x, dt), D.structure());
}

DriftMatrix kolmogorov2d() {
  Mat B(2, 2);
  B << 0, 1, 0, 0;
  return validate_structure(B, {1, 1});
}

}  // namespace hypoou
