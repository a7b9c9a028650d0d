#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mpeig/dense_kernels.hpp"
#include "mpeig/dense_matrix.hpp"

namespace mpeig {

template <class T>
struct QrFactors {
  DenseMatrix<T> Q;
  DenseMatrix<T> R;  // upper triangular, real positive diagonal
};

namespace detail {

template <class T>
struct HouseholderSet {
  std::vector<std::vector<T>> v;
  std::vector<real_t<T>> beta;
  DenseMatrix<T> R;  // rows x cols, upper trapezoid
};

// Reduce A to upper trapezoid with Householder reflectors.  A column whose
// remaining norm underflows to zero ends the factorization with
// RankDeficient; callers that can shrink the basis catch it.
template <class T>
HouseholderSet<T> householder_reduce(const DenseMatrix<T>& A) {
  using R = real_t<T>;
  const std::size_t n = A.rows(), m = A.cols();
  const std::size_t steps = n < m ? n : m;
  HouseholderSet<T> H;
  H.R = A;
  H.v.resize(steps);
  H.beta.resize(steps, R(0));
  for (std::size_t j = 0; j < steps; ++j) {
    const std::size_t len = n - j;
    R nrm2 = 0;
    for (std::size_t i = j; i < n; ++i) {
      const R a = abs_s(H.R(i, j));
      nrm2 += a * a;
    }
    const R nrm = std::sqrt(nrm2);
    if (nrm == 0)
      throw RankDeficient(j, "householder_qr: column " + std::to_string(j) +
                                 " vanished");
    const T x0 = H.R(j, j);
    const R ax0 = abs_s(x0);
    const T phase = ax0 > 0 ? x0 / ax0 : T{1};

    std::vector<T>& v = H.v[j];
    v.resize(len);
    v[0] = x0 + phase * nrm;
    for (std::size_t i = 1; i < len; ++i) v[i] = H.R(j + i, j);
    R vnrm2 = 0;
    for (std::size_t i = 0; i < len; ++i) {
      const R a = abs_s(v[i]);
      vnrm2 += a * a;
    }
    H.beta[j] = R(2) / vnrm2;

    // apply I - beta v v^* to the trailing columns
    for (std::size_t c = j; c < m; ++c) {
      T s{};
      for (std::size_t i = 0; i < len; ++i) s += conj_s(v[i]) * H.R(j + i, c);
      s *= static_cast<T>(H.beta[j]);
      for (std::size_t i = 0; i < len; ++i) H.R(j + i, c) -= s * v[i];
    }
    H.R(j, j) = -phase * nrm;
    for (std::size_t i = j + 1; i < n; ++i) H.R(i, j) = T{};
  }
  return H;
}

template <class T>
void apply_reflectors_to(const HouseholderSet<T>& H, DenseMatrix<T>& Q) {
  const std::size_t n = Q.rows();
  for (std::size_t jj = H.v.size(); jj-- > 0;) {
    const std::vector<T>& v = H.v[jj];
    const std::size_t len = v.size();
    for (std::size_t c = 0; c < Q.cols(); ++c) {
      T* qc = Q.col(c);
      T s{};
      for (std::size_t i = 0; i < len; ++i) s += conj_s(v[i]) * qc[n - len + i];
      s *= static_cast<T>(H.beta[jj]);
      for (std::size_t i = 0; i < len; ++i) qc[n - len + i] -= s * v[i];
    }
  }
}

// Rotate phases so diag(R) is real and positive; Q columns absorb them.
template <class T>
void fix_diagonal_phases(DenseMatrix<T>& Q, DenseMatrix<T>& R) {
  const std::size_t steps = R.rows() < R.cols() ? R.rows() : R.cols();
  for (std::size_t j = 0; j < steps; ++j) {
    const T d = R(j, j);
    const real_t<T> ad = abs_s(d);
    if (ad == 0)
      throw RankDeficient(j, "qr: exactly singular diagonal at " + std::to_string(j));
    const T ph = d / ad;
    if (ph == T{1}) continue;
    const T phc = conj_s(ph);
    for (std::size_t c = j; c < R.cols(); ++c) R(j, c) *= phc;
    T* qj = Q.col(j);
    for (std::size_t i = 0; i < Q.rows(); ++i) qj[i] *= ph;
  }
}

// Full square-Q variant for small blocks of any shape (used to build the
// basis-conditioning rotation in the LOBPCG update).
template <class T>
QrFactors<T> householder_qr_square(const DenseMatrix<T>& A) {
  HouseholderSet<T> H = householder_reduce(A);
  DenseMatrix<T> Q = DenseMatrix<T>::identity(A.rows());
  apply_reflectors_to(H, Q);
  fix_diagonal_phases(Q, H.R);
  return {std::move(Q), std::move(H.R)};
}

}  // namespace detail

// Thin Householder QR of a tall matrix: Q is rows x cols with orthonormal
// columns, R is square upper triangular with real positive diagonal.
template <class T>
QrFactors<T> householder_qr(const DenseMatrix<T>& A) {
  const std::size_t n = A.rows(), m = A.cols();
  if (n < m) throw DimensionMismatch("householder_qr: more columns than rows");
  detail::HouseholderSet<T> H = detail::householder_reduce(A);
  DenseMatrix<T> Q(n, m);
  for (std::size_t j = 0; j < m; ++j) Q(j, j) = T{1};
  detail::apply_reflectors_to(H, Q);
  DenseMatrix<T> R(m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i <= j; ++i) R(i, j) = H.R(i, j);
  detail::fix_diagonal_phases(Q, R);
  return {std::move(Q), std::move(R)};
}

// QR via the Gram matrix: V^*V = L L^*, Q = V L^{-*}, R = L^*.  Fast and
// accurate enough once V is already well conditioned; NotPositiveDefinite
// signals that it is not.
template <class T>
QrFactors<T> cholesky_qr(const DenseMatrix<T>& V) {
  if (V.rows() < V.cols())
    throw DimensionMismatch("cholesky_qr: more columns than rows");
  DenseMatrix<T> G = adjoint_matmul(V, V);
  for (std::size_t j = 0; j < G.cols(); ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      const T v = (G(i, j) + conj_s(G(j, i))) / real_t<T>(2);
      G(i, j) = v;
      G(j, i) = conj_s(v);
    }
  const DenseMatrix<T> L = dense_cholesky(G);
  DenseMatrix<T> R = L.adjoint();
  DenseMatrix<T> Q = tri_solve(R, V, TriMode::UpperInverseRight);
  return {std::move(Q), std::move(R)};
}

// Orthonormalization that does most of its work in the narrow format.
//
//   1. QR of the rounded matrix in lower precision; keep only R_l.
//   2. V = A * R_l^{-1} back in working precision (a right triangular solve),
//      which leaves V well conditioned even when A is not.
//   3. Cholesky QR of V at working precision.
//
// The returned Q is orthonormal to working precision for condition numbers
// up to about 1e7 (where the narrow QR stops being a useful preconditioner
// for step 2); past that, step 3's Cholesky fails and callers fall back to
// a full working-precision QR.
template <class T>
QrFactors<T> mixed_qr(const DenseMatrix<T>& A) {
  static_assert(precision_v<T> == Precision::Working,
                "mixed_qr runs on working-precision input");
  if (A.rows() < A.cols())
    throw DimensionMismatch("mixed_qr: more columns than rows");
  const DenseMatrix<lower_t<T>> Al = to_lower(A);
  QrFactors<lower_t<T>> low = householder_qr(Al);
  const DenseMatrix<T> Rw = to_working(low.R);
  const DenseMatrix<T> V = tri_solve(Rw, A, TriMode::UpperInverseRight);
  QrFactors<T> cq = cholesky_qr(V);
  DenseMatrix<T> R = matmul(cq.R, Rw);
  return {std::move(cq.Q), std::move(R)};
}

// W minus its projection onto the (orthonormal) columns of B, repeated
// `passes` times.  Empty B is a no-op.
template <class T>
DenseMatrix<T> block_project_out(const DenseMatrix<T>& W, const DenseMatrix<T>& B,
                                 int passes = 2) {
  if (B.cols() == 0 || passes <= 0) return W;
  if (B.rows() != W.rows())
    throw DimensionMismatch("block_project_out: row counts differ");
  DenseMatrix<T> Y = W;
  for (int p = 0; p < passes; ++p)
    Y = subtract(Y, matmul(B, adjoint_matmul(B, Y)));
  return Y;
}

// Rank-revealing escape hatch: two-pass MGS that drops columns whose
// post-projection norm collapses below drop_tol times their original norm.
// Returns an orthonormal basis of the surviving columns.
template <class T>
DenseMatrix<T> orthonormalize_dropping(const DenseMatrix<T>& W, real_t<T> drop_tol,
                                       std::size_t* dropped) {
  using R = real_t<T>;
  const std::size_t n = W.rows();
  std::vector<std::vector<T>> basis;
  std::size_t drop_count = 0;
  std::vector<T> v(n);
  for (std::size_t j = 0; j < W.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) v[i] = W(i, j);
    R n0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const R a = abs_s(v[i]);
      n0 += a * a;
    }
    n0 = std::sqrt(n0);
    if (n0 == 0) {
      ++drop_count;
      continue;
    }
    for (int pass = 0; pass < 2; ++pass)
      for (const std::vector<T>& q : basis) {
        T s{};
        for (std::size_t i = 0; i < n; ++i) s += conj_s(q[i]) * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= s * q[i];
      }
    R nv = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const R a = abs_s(v[i]);
      nv += a * a;
    }
    nv = std::sqrt(nv);
    if (nv <= drop_tol * n0) {
      ++drop_count;
      continue;
    }
    std::vector<T> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = v[i] / nv;
    basis.push_back(std::move(q));
  }
  if (dropped) *dropped = drop_count;
  DenseMatrix<T> Q(n, basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) Q(i, j) = basis[j][i];
  return Q;
}

}  // namespace mpeig
