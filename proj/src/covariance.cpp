#include "hypoou/covariance.hpp"

#include "hypoou/errors.hpp"
#include "hypoou/expm.hpp"
#include "hypoou/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace hypoou {

Mat exp_drift(double s, const DriftMatrix& D, DriftMode mode) {
  return mode == DriftMode::full ? D.E(s) : D.E0(s);
}

Mat integrated_gram(const Mat& M, const Mat& A, double t) {
  const Eigen::Index n = M.rows();
  Mat H = Mat::Zero(2 * n, 2 * n);
  H.topLeftCorner(n, n) = M;
  H.topRightCorner(n, n) = A;
  H.bottomRightCorner(n, n) = -M.transpose();
  const Mat F = expm(t * H);
  // F12 = G e^{-tMᵀ} and F11 = e^{tM}, so G = F12 F11ᵀ.
  Mat G = F.topRightCorner(n, n) * F.topLeftCorner(n, n).transpose();
  return 0.5 * (G + G.transpose());
}

Mat integrated_gram_quadrature(const Mat& M, const Mat& A, double t, double tol) {
  auto integrand = [&](double s) -> Mat {
    const Mat E = expm(s * M);
    return E * A * E.transpose();
  };
  Mat G = adaptive_gauss_legendre(integrand, 0.0, t, tol);
  return 0.5 * (G + G.transpose());
}

namespace {

std::pair<Mat, Mat> generator_and_source(const Mat& A0, const DriftMatrix& D, CovKind which) {
  const int N = D.N();
  switch (which) {
    case CovKind::C:
      return {-D.B().transpose(), embed_diffusion(A0, N)};
    case CovKind::C0:
      return {-D.B0().transpose(), embed_diffusion(A0, N)};
    case CovKind::Ctilde:
      return {-D.B0().transpose(), embed_diffusion(Mat::Identity(D.p0(), D.p0()), N)};
  }
  return {};
}

}  // namespace

Mat covariance(const Mat& A0, double t, const DriftMatrix& D, CovKind which) {
  const int N = D.N();
  if (t == 0.0) return Mat::Zero(N, N);
  if (t < 0.0) throw NonPositiveTime("covariance requested at negative time");
  auto [M, A] = generator_and_source(A0, D, which);
  // With S = D(√t): C(t) = S [∫_0^1 e^{uM̂} Â e^{uM̂ᵀ} du] S, M̂ = S⁻¹(tM)S, Â = t S⁻¹AS⁻¹.
  Vec s(N);
  const double rt = std::sqrt(t);
  for (int k = 0; k < N; ++k) s[k] = std::pow(rt, D.structure().q()[k]);
  Mat Mh(N, N), Ah(N, N);
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      Mh(i, k) = t * M(i, k) * (s[k] / s[i]);
      Ah(i, k) = t * A(i, k) / (s[i] * s[k]);
    }
  const Mat G = integrated_gram(Mh, Ah, 1.0);
  return s.asDiagonal() * G * s.asDiagonal();
}

Mat covariance_quadrature(const Mat& A0, double t, const DriftMatrix& D, CovKind which,
                          double tol) {
  if (t < 0.0) throw NonPositiveTime("covariance requested at negative time");
  auto [M, A] = generator_and_source(A0, D, which);
  return integrated_gram_quadrature(M, A, t, tol);
}

CholeskyFactor::CholeskyFactor(const Mat& C) : llt(C) {
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("Cholesky factorization failed");
  const Mat L = llt.matrixL();
  for (Eigen::Index k = 0; k < L.rows(); ++k) {
    if (!(L(k, k) > 0.0) || !std::isfinite(L(k, k)))
      throw NotPositiveDefinite("Cholesky factorization failed");
    logdet += 2.0 * std::log(L(k, k));
  }
}

Mat CholeskyFactor::inverse() const {
  const Eigen::Index n = llt.matrixLLT().rows();
  Mat inv = llt.solve(Mat::Identity(n, n));
  return 0.5 * (inv + inv.transpose());
}

CovarianceSet covariance_matrix(const Point& z0, double t, const CoefficientField& field,
                                const DriftMatrix& D, CovKind which) {
  if (!(t > 0.0)) throw NonPositiveTime("covariance inverse requested at t <= 0");
  const Mat A0 = field.evaluate(z0);
  CovarianceSet out;
  out.z0 = z0;
  out.t = t;
  out.which = which;
  out.C = covariance(A0, t, D, CovKind::C);
  out.C0 = covariance(A0, t, D, CovKind::C0);
  out.Ctilde = covariance(A0, t, D, CovKind::Ctilde);
  const CholeskyFactor f(out.selected());
  out.Cinv = f.inverse();
  out.logdetC = f.logdet;
  out.detC = std::exp(f.logdet);
  return out;
}

HypoellipticityReport hypoellipticity_check(const Mat& B, const std::vector<int>& blocks) {
  HypoellipticityReport rep;
  const BlockStructure s(blocks);
  if (B.rows() != s.N() || B.cols() != s.N()) throw BlockSizeError("B does not match the blocks");
  try {
    validate_structure(B, blocks);
    rep.structural = true;
  } catch (const RankError& e) {
    rep.reason = e.what();
  } catch (const StructureError& e) {
    rep.reason = e.what();
  }
  // B0 read off the superdiagonal blocks whatever their rank.
  Mat B0 = Mat::Zero(s.N(), s.N());
  for (int j = 1; j <= s.r(); ++j)
    B0.block(s.offset(j - 1), s.offset(j), blocks[j - 1], blocks[j]) =
        B.block(s.offset(j - 1), s.offset(j), blocks[j - 1], blocks[j]);
  const Mat I0 = embed_diffusion(Mat::Identity(s.p0(), s.p0()), s.N());
  rep.numerical = true;
  for (double t : {1e-3, 1e-1, 1.0}) {
    const Mat Ct = integrated_gram(-t * B0.transpose(), t * I0, 1.0);
    const Vec d = Ct.diagonal();
    double minEig = 0.0;
    if ((d.array() > 0.0).all()) {
      const Vec is = d.array().rsqrt();
      const Mat K = is.asDiagonal() * Ct * is.asDiagonal();
      minEig = Eigen::SelfAdjointEigenSolver<Mat>(K).eigenvalues().minCoeff();
    }
    rep.minEigCtilde.emplace_back(t, minEig);
    if (!(minEig > 1e-10)) rep.numerical = false;
  }
  rep.agree = rep.structural == rep.numerical;
  return rep;
}

double scaling_check(const Point& z0, double t, const CoefficientField& field,
                     const DriftMatrix& D) {
  if (!(t > 0.0)) throw NonPositiveTime("scaling check needs t > 0");
  const Mat A0 = field.evaluate(z0);
  const Mat Ct = covariance_quadrature(A0, t, D, CovKind::C0);
  const Mat C1 = covariance(A0, 1.0, D, CovKind::C0);
  const auto S = dilation_matrix(std::sqrt(t), DilationMode::space, D.structure());
  const Mat scaled = S * C1 * S;
  double err = 0.0;
  for (Eigen::Index i = 0; i < Ct.rows(); ++i)
    for (Eigen::Index j = 0; j < Ct.cols(); ++j) {
      const double ref = std::abs(scaled(i, j));
      const double diff = std::abs(Ct(i, j) - scaled(i, j));
      if (ref > 0.0) {
        err = std::max(err, diff / ref);
      } else {
        // Structural zero: compare against the geometric scale of the entry.
        err = std::max(err, diff / std::sqrt(std::abs(scaled(i, i) * scaled(j, j))));
      }
    }
  return err;
}

}  // namespace hypoou
