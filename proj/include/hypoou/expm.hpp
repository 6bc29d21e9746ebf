#pragma once

// Matrix exponential by scaling and squaring with diagonal Padé approximants
// of degree 3, 5, 7, 9 or 13, chosen from the 1-norm of the argument.

#include <Eigen/Dense>

#include <cmath>

namespace hypoou {

namespace detail {

template <typename Matrix>
void pade3(const Matrix& A, Matrix& U, Matrix& V) {
  using S = typename Matrix::Scalar;
  const S b[] = {S(120), S(60), S(12), S(1)};
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  const Matrix A2 = A * A;
  U.noalias() = A * (b[3] * A2 + b[1] * I);
  V = b[2] * A2 + b[0] * I;
}

template <typename Matrix>
void pade5(const Matrix& A, Matrix& U, Matrix& V) {
  using S = typename Matrix::Scalar;
  const S b[] = {S(30240), S(15120), S(3360), S(420), S(30), S(1)};
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  U.noalias() = A * (b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[4] * A4 + b[2] * A2 + b[0] * I;
}

template <typename Matrix>
void pade7(const Matrix& A, Matrix& U, Matrix& V) {
  using S = typename Matrix::Scalar;
  const S b[] = {S(17297280), S(8648640), S(1995840), S(277200),
                 S(25200),    S(1512),    S(56),      S(1)};
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A4 * A2;
  U.noalias() = A * (b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

template <typename Matrix>
void pade9(const Matrix& A, Matrix& U, Matrix& V) {
  using S = typename Matrix::Scalar;
  const S b[] = {S(17643225600.0), S(8821612800.0), S(2075673600.0), S(302702400.0),
                 S(30270240.0),    S(2162160.0),    S(110880.0),     S(3960.0),
                 S(90.0),          S(1.0)};
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A4 * A2;
  const Matrix A8 = A6 * A2;
  U.noalias() = A * (b[9] * A8 + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[8] * A8 + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

template <typename Matrix>
void pade13(const Matrix& A, Matrix& U, Matrix& V) {
  using S = typename Matrix::Scalar;
  const S b[] = {S(64764752532480000.0), S(32382376266240000.0), S(7771770303897600.0),
                 S(1187353796428800.0),  S(129060195264000.0),   S(10559470521600.0),
                 S(670442572800.0),      S(33522128640.0),       S(1323241920.0),
                 S(40840800.0),          S(960960.0),            S(16380.0),
                 S(182.0),               S(1.0)};
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A4 * A2;
  Matrix inner = b[13] * A6 + b[11] * A4 + b[9] * A2;
  U.noalias() = A * (A6 * inner + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  inner = b[12] * A6 + b[10] * A4 + b[8] * A2;
  V = A6 * inner + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

}  // namespace detail

/// exp(A) for a square real matrix expression.
template <typename Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& arg) {
  using Matrix = typename Derived::PlainObject;
  using S = typename Derived::Scalar;
  const Matrix A = arg;
  const S norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  Matrix U(A.rows(), A.cols()), V(A.rows(), A.cols());
  int squarings = 0;
  if (norm1 < S(1.495585217958292e-2)) {
    detail::pade3(A, U, V);
  } else if (norm1 < S(2.539398330063230e-1)) {
    detail::pade5(A, U, V);
  } else if (norm1 < S(9.504178996162932e-1)) {
    detail::pade7(A, U, V);
  } else if (norm1 < S(2.097847961257068e0)) {
    detail::pade9(A, U, V);
  } else {
    const S theta13 = S(5.371920351148152e0);
    if (norm1 > theta13) {
      squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
    }
    const Matrix scaled = A / std::ldexp(S(1), squarings);
    detail::pade13(scaled, U, V);
  }
  Matrix result = (V - U).partialPivLu().solve(V + U);
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

/// exp(A) when A is known to be nilpotent: the power series terminates at A^(n-1).
template <typename Derived>
typename Derived::PlainObject expm_nilpotent(const Eigen::MatrixBase<Derived>& arg) {
  using Matrix = typename Derived::PlainObject;
  const Matrix A = arg;
  Matrix term = Matrix::Identity(A.rows(), A.cols());
  Matrix sum = term;
  for (Eigen::Index k = 1; k < A.rows(); ++k) {
    term = (term * A) / static_cast<typename Derived::Scalar>(k);
    sum += term;
  }
  return sum;
}

}  // namespace hypoou
