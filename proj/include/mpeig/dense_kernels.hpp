#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "mpeig/dense_matrix.hpp"

namespace mpeig {

// Residual thresholds used by the dense kernels' internal sanity checks.
inline constexpr double kTolOrth = 1e-10;
inline constexpr double kTolEig = 1e-12;

template <class T>
using BlockOperator = std::function<DenseMatrix<T>(const DenseMatrix<T>&)>;

// C = A*B.  Accumulation runs over k in ascending order for every entry,
// so results are bit-reproducible for a given build.
template <class T>
DenseMatrix<T> matmul(const DenseMatrix<T>& A, const DenseMatrix<T>& B) {
  if (A.cols() != B.rows()) throw DimensionMismatch("matmul: inner dims differ");
  DenseMatrix<T> C(A.rows(), B.cols());
  const std::size_t n = A.rows(), k = A.cols(), m = B.cols();
  for (std::size_t j = 0; j < m; ++j) {
    T* cj = C.col(j);
    for (std::size_t l = 0; l < k; ++l) {
      const T b = B(l, j);
      const T* al = A.col(l);
      for (std::size_t i = 0; i < n; ++i) cj[i] += al[i] * b;
    }
  }
  return C;
}

// C = A^* B
template <class T>
DenseMatrix<T> adjoint_matmul(const DenseMatrix<T>& A, const DenseMatrix<T>& B) {
  if (A.rows() != B.rows())
    throw DimensionMismatch("adjoint_matmul: row counts differ");
  DenseMatrix<T> C(A.cols(), B.cols());
  for (std::size_t j = 0; j < B.cols(); ++j) {
    const T* bj = B.col(j);
    for (std::size_t i = 0; i < A.cols(); ++i) {
      const T* ai = A.col(i);
      T s{};
      for (std::size_t l = 0; l < A.rows(); ++l) s += conj_s(ai[l]) * bj[l];
      C(i, j) = s;
    }
  }
  return C;
}

template <class T>
DenseMatrix<T> subtract(const DenseMatrix<T>& A, const DenseMatrix<T>& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw DimensionMismatch("subtract: shapes differ");
  DenseMatrix<T> C(A.rows(), A.cols());
  for (std::size_t i = 0; i < C.data().size(); ++i)
    C.data()[i] = A.data()[i] - B.data()[i];
  return C;
}

// A*X for square A.  A is expected Hermitian; only shapes are checked here,
// hermiticity is the caller's contract (checked once where A enters).
template <class T>
DenseMatrix<T> herm_product(const DenseMatrix<T>& A, const DenseMatrix<T>& X) {
  if (A.rows() != A.cols()) throw DimensionMismatch("herm_product: A not square");
  if (A.cols() != X.rows())
    throw DimensionMismatch("herm_product: A and X do not conform");
  return matmul(A, X);
}

// x^*Ax / x^*x as a real scalar
template <class T>
real_t<T> rayleigh_quotient(const DenseMatrix<T>& A, const DenseMatrix<T>& x) {
  if (x.cols() != 1) throw DimensionMismatch("rayleigh_quotient: x not a vector");
  if (A.rows() != A.cols() || A.cols() != x.rows())
    throw DimensionMismatch("rayleigh_quotient: shapes do not conform");
  real_t<T> nrm2 = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const real_t<T> a = abs_s(x(i, 0));
    nrm2 += a * a;
  }
  if (nrm2 == 0) throw ZeroVector("rayleigh_quotient: zero vector");
  const DenseMatrix<T> Ax = matmul(A, x);
  T num{};
  for (std::size_t i = 0; i < x.rows(); ++i) num += conj_s(x(i, 0)) * Ax(i, 0);
  return real_s(num) / nrm2;
}

// Replace M by its Hermitian part (M + M^*)/2 with an exactly real diagonal.
template <class T>
void hermitize(DenseMatrix<T>& M) {
  if (M.rows() != M.cols()) throw DimensionMismatch("hermitize: not square");
  for (std::size_t j = 0; j < M.cols(); ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      const T v = (M(i, j) + conj_s(M(j, i))) / real_t<T>(2);
      M(i, j) = v;
      M(j, i) = conj_s(v);
    }
  if constexpr (is_complex_v<T>) {
    for (std::size_t i = 0; i < M.cols(); ++i) M(i, i) = T(real_s(M(i, i)), 0);
  }
}

// Theta = X^*AX, returned with the Hermitian part enforced so downstream
// eigensolves see an exactly Hermitian block.  When X drifts away from
// orthonormality past kTolOrth the optional flag is raised and the
// computation proceeds.
template <class T>
DenseMatrix<T> block_rayleigh(const DenseMatrix<T>& A, const DenseMatrix<T>& X,
                              bool* not_orthonormal = nullptr) {
  const DenseMatrix<T> AX = herm_product(A, X);
  DenseMatrix<T> Th = adjoint_matmul(X, AX);
  hermitize(Th);
  if (not_orthonormal) {
    DenseMatrix<T> G = adjoint_matmul(X, X);
    for (std::size_t i = 0; i < G.cols(); ++i) G(i, i) -= T{1};
    *not_orthonormal = G.frobenius_norm() > static_cast<real_t<T>>(kTolOrth);
  }
  return Th;
}

// Unpivoted lower Cholesky A = L L^*.  Left-looking, inner sums run left to
// right.  Throws with the failing pivot index; a non-finite pivot means the
// arithmetic overflowed (possible in binary32).
template <class T>
DenseMatrix<T> dense_cholesky(const DenseMatrix<T>& A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("dense_cholesky: not square");
  const std::size_t n = A.rows();
  DenseMatrix<T> L(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j; i < n; ++i) {
      T s = A(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * conj_s(L(j, k));
      if (i == j) {
        const real_t<T> d = real_s(s);
        if (!std::isfinite(static_cast<double>(d)))
          throw OverflowError("dense_cholesky: pivot " + std::to_string(j) +
                              " is not finite");
        if (!(d > 0))
          throw NotPositiveDefinite(j, "dense_cholesky: nonpositive pivot at " +
                                           std::to_string(j));
        L(j, j) = static_cast<T>(std::sqrt(d));
      } else {
        L(i, j) = s / real_s(L(j, j));
      }
    }
  }
  return L;
}

enum class TriMode {
  Forward,           // solve L X = B, L lower triangular
  BackwardAdjoint,   // solve L^* X = B, L lower triangular
  UpperInverseRight  // solve X U = B, U upper triangular
};

namespace detail {

template <class T>
void check_tri_diag(const DenseMatrix<T>& M, std::size_t j) {
  const real_t<T> a = abs_s(M(j, j));
  if (a == 0 || a < std::numeric_limits<real_t<T>>::min())
    throw SingularTriangular(j, "tri_solve: zero or subnormal diagonal at " +
                                    std::to_string(j));
}

}  // namespace detail

template <class T>
DenseMatrix<T> tri_solve(const DenseMatrix<T>& F, const DenseMatrix<T>& B,
                         TriMode mode) {
  if (F.rows() != F.cols()) throw DimensionMismatch("tri_solve: F not square");
  const std::size_t n = F.rows();
  if (mode == TriMode::UpperInverseRight) {
    if (B.cols() != n) throw DimensionMismatch("tri_solve: B U mismatch");
    for (std::size_t j = 0; j < n; ++j) detail::check_tri_diag(F, j);
    DenseMatrix<T> X(B.rows(), n);
    for (std::size_t j = 0; j < n; ++j) {
      T* xj = X.col(j);
      const T* bj = B.col(j);
      for (std::size_t i = 0; i < B.rows(); ++i) xj[i] = bj[i];
      for (std::size_t k = 0; k < j; ++k) {
        const T u = F(k, j);
        const T* xk = X.col(k);
        for (std::size_t i = 0; i < B.rows(); ++i) xj[i] -= xk[i] * u;
      }
      const T d = F(j, j);
      for (std::size_t i = 0; i < B.rows(); ++i) xj[i] /= d;
    }
    return X;
  }
  if (B.rows() != n) throw DimensionMismatch("tri_solve: F and B do not conform");
  for (std::size_t j = 0; j < n; ++j) detail::check_tri_diag(F, j);
  DenseMatrix<T> X(n, B.cols());
  if (mode == TriMode::Forward) {
    for (std::size_t c = 0; c < B.cols(); ++c) {
      T* x = X.col(c);
      const T* b = B.col(c);
      for (std::size_t i = 0; i < n; ++i) x[i] = b[i];
      for (std::size_t k = 0; k < n; ++k) {
        x[k] /= F(k, k);
        const T xk = x[k];
        const T* fk = F.col(k);
        for (std::size_t i = k + 1; i < n; ++i) x[i] -= fk[i] * xk;
      }
    }
  } else {  // BackwardAdjoint: column i of L^* is the conjugated row i of L,
            // read contiguously from column i below the diagonal.
    for (std::size_t c = 0; c < B.cols(); ++c) {
      T* x = X.col(c);
      const T* b = B.col(c);
      for (std::size_t ii = n; ii-- > 0;) {
        T s = b[ii];
        const T* fi = F.col(ii);
        for (std::size_t k = ii + 1; k < n; ++k) s -= conj_s(fi[k]) * x[k];
        x[ii] = s / conj_s(F(ii, ii));
      }
    }
  }
  return X;
}

}  // namespace mpeig
