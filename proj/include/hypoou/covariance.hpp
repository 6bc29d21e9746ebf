#pragma once

// Covariance matrices C(z0;t), C0(z0;t) and C̃(t) of the frozen operator.

#include "hypoou/algebra.hpp"
#include "hypoou/field.hpp"

#include <Eigen/Cholesky>

#include <utility>
#include <vector>

namespace hypoou {

enum class DriftMode { full, principal };
enum class CovKind { C, C0, Ctilde };

/// exp(-s Bᵀ) or exp(-s B0ᵀ).
Mat exp_drift(double s, const DriftMatrix& D, DriftMode mode);

/// ∫_0^t e^{sM} A e^{sMᵀ} ds from one exponential of [[M, A], [0, -Mᵀ]]·t.
Mat integrated_gram(const Mat& M, const Mat& A, double t);

/// Same integral by adaptive Gauss-Legendre; the oracle for integrated_gram.
Mat integrated_gram_quadrature(const Mat& M, const Mat& A, double t, double tol = 1e-13);

/// Covariance for a frozen p0×p0 diffusion block. The block exponential is
/// balanced by the diagonal similarity D(√t) so that the entries of size
/// t^{q_i+q_j} keep full relative accuracy as t → 0.
Mat covariance(const Mat& A0, double t, const DriftMatrix& D, CovKind which);

/// The defining integral evaluated directly by quadrature (no block exponential).
Mat covariance_quadrature(const Mat& A0, double t, const DriftMatrix& D, CovKind which,
                          double tol = 1e-13);

/// Cholesky factor with log-determinant; throws NotPositiveDefinite.
struct CholeskyFactor {
  Eigen::LLT<Mat> llt;
  double logdet = 0.0;

  explicit CholeskyFactor(const Mat& C);
  Mat L() const { return llt.matrixL(); }
  Vec solve(const Vec& b) const { return llt.solve(b); }
  Mat inverse() const;
};

struct CovarianceSet {
  Point z0;
  double t = 0.0;
  CovKind which = CovKind::C;
  Mat C;
  Mat C0;
  Mat Ctilde;
  Mat Cinv;  // inverse of the selected matrix
  double detC = 0.0;
  double logdetC = 0.0;
  const Mat& selected() const {
    return which == CovKind::C ? C : which == CovKind::C0 ? C0 : Ctilde;
  }
};

/// All three covariances at (z0, t); inverse and determinant of `which`.
CovarianceSet covariance_matrix(const Point& z0, double t, const CoefficientField& field,
                                const DriftMatrix& D, CovKind which);

struct HypoellipticityReport {
  bool structural = false;
  bool numerical = false;
  bool agree = false;
  std::string reason;
  /// (t, smallest eigenvalue of the diagonally normalized C̃(t)).
  std::vector<std::pair<double, double>> minEigCtilde;
};

/// Structural rank test against the positivity of C̃(t) at t ∈ {1e-3, 1e-1, 1}.
HypoellipticityReport hypoellipticity_check(const Mat& B, const std::vector<int>& blocks);

/// Max elementwise relative deviation of C0(z0;t) (by quadrature of its
/// defining integral) from D(√t) C0(z0;1) D(√t).
double scaling_check(const Point& z0, double t, const CoefficientField& field,
                     const DriftMatrix& D);

}  // namespace hypoou
