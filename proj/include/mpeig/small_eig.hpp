#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "mpeig/dense_kernels.hpp"
#include "mpeig/dense_matrix.hpp"

namespace mpeig {

template <class T>
struct EigDecomposition {
  std::vector<real_t<T>> values;  // ascending
  DenseMatrix<T> vectors;         // unitary, column j pairs with values[j]
};

namespace detail {

// Implicit-shift QL with Wilkinson shifts on a real symmetric tridiagonal
// (d, e), rotations accumulated into the columns of V.  e[i] couples i and
// i+1.  The sweep budget is 30*n in total; hitting it raises NoConvergence.
template <class T>
void tridiag_ql(std::vector<real_t<T>>& d, std::vector<real_t<T>>& e,
                DenseMatrix<T>& V) {
  using R = real_t<T>;
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n, R(0));
  const R eps = std::numeric_limits<R>::epsilon();
  std::size_t sweeps = 0;
  const std::size_t cap = 30 * n;

  for (std::size_t l = 0; l < n; ++l) {
    for (;;) {
      std::size_t m = l;
      while (m + 1 < n) {
        const R dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
        ++m;
      }
      if (m == l) break;
      if (++sweeps > cap)
        throw NoConvergence("small_herm_eig: QL sweep budget exhausted");

      R g = (d[l + 1] - d[l]) / (2 * e[l]);
      R r = std::hypot(g, R(1));
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      R s = 1, c = 1, p = 0;
      bool underflowed = false;
      for (std::size_t i1 = m; i1-- > l;) {
        R f = s * e[i1];
        const R b = c * e[i1];
        r = std::hypot(f, g);
        e[i1 + 1] = r;
        if (r == 0) {
          d[i1 + 1] -= p;
          e[m] = 0;
          underflowed = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i1 + 1] - p;
        r = (d[i1] - g) * s + 2 * c * b;
        p = s * r;
        d[i1 + 1] = g + p;
        g = c * r - b;
        for (std::size_t row = 0; row < V.rows(); ++row) {
          const T tmp = V(row, i1 + 1);
          V(row, i1 + 1) = static_cast<T>(s) * V(row, i1) + static_cast<T>(c) * tmp;
          V(row, i1) = static_cast<T>(c) * V(row, i1) - static_cast<T>(s) * tmp;
        }
      }
      if (underflowed) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0;
    }
  }
}

}  // namespace detail

// Full eigendecomposition of a small Hermitian matrix: Householder
// tridiagonalization, a diagonal phase scaling that makes the subdiagonal
// real nonnegative, then QL with implicit Wilkinson shifts.  Works on the
// Hermitian part of M.  All reductions are fixed-order, so repeated calls
// on identical input give identical bits.
template <class T>
EigDecomposition<T> small_herm_eig(const DenseMatrix<T>& M) {
  using R = real_t<T>;
  if (M.rows() != M.cols()) throw DimensionMismatch("small_herm_eig: not square");
  const std::size_t n = M.rows();
  EigDecomposition<T> out;
  if (n == 0) {
    out.vectors = DenseMatrix<T>(0, 0);
    return out;
  }

  DenseMatrix<T> W(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      W(i, j) = (M(i, j) + conj_s(M(j, i))) / R(2);

  DenseMatrix<T> Q = DenseMatrix<T>::identity(n);
  std::vector<T> v(n), p(n), w(n), u(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    R nrm2 = 0;
    for (std::size_t i = 0; i < len; ++i) {
      const R a = abs_s(W(k + 1 + i, k));
      nrm2 += a * a;
    }
    const R nrm = std::sqrt(nrm2);
    if (nrm == 0) continue;

    const T x0 = W(k + 1, k);
    const R ax0 = abs_s(x0);
    const T phase = ax0 > 0 ? x0 / ax0 : T{1};
    const T alpha = -phase * nrm;

    // v = x - alpha*e1
    v[0] = x0 + phase * nrm;
    for (std::size_t i = 1; i < len; ++i) v[i] = W(k + 1 + i, k);
    R vnrm2 = 0;
    for (std::size_t i = 0; i < len; ++i) {
      const R a = abs_s(v[i]);
      vnrm2 += a * a;
    }
    const R beta = R(2) / vnrm2;

    // two-sided update of the trailing block B = W(k+1:, k+1:):
    // p = beta*B*v, w = p - (beta/2)(v^*p) v, B -= v w^* + w v^*
    for (std::size_t i = 0; i < len; ++i) p[i] = T{};
    for (std::size_t j = 0; j < len; ++j) {
      const T vj = v[j];
      for (std::size_t i = 0; i < len; ++i)
        p[i] += W(k + 1 + i, k + 1 + j) * vj;
    }
    for (std::size_t i = 0; i < len; ++i) p[i] *= static_cast<T>(beta);
    T vtp{};
    for (std::size_t i = 0; i < len; ++i) vtp += conj_s(v[i]) * p[i];
    const R kappa = beta * real_s(vtp) / R(2);
    for (std::size_t i = 0; i < len; ++i) w[i] = p[i] - static_cast<T>(kappa) * v[i];
    for (std::size_t j = 0; j < len; ++j)
      for (std::size_t i = 0; i < len; ++i)
        W(k + 1 + i, k + 1 + j) -= v[i] * conj_s(w[j]) + w[i] * conj_s(v[j]);

    W(k + 1, k) = alpha;
    W(k, k + 1) = conj_s(alpha);
    for (std::size_t i = 2; i <= len; ++i) {
      W(k + i, k) = T{};
      W(k, k + i) = T{};
    }

    // Q(:, k+1:) *= (I - beta v v^*)
    for (std::size_t r = 0; r < n; ++r) u[r] = T{};
    for (std::size_t j = 0; j < len; ++j) {
      const T vj = v[j];
      const T* qj = Q.col(k + 1 + j);
      for (std::size_t r = 0; r < n; ++r) u[r] += qj[r] * vj;
    }
    for (std::size_t j = 0; j < len; ++j) {
      const T f = static_cast<T>(beta) * conj_s(v[j]);
      T* qj = Q.col(k + 1 + j);
      for (std::size_t r = 0; r < n; ++r) qj[r] -= u[r] * f;
    }
  }

  // Extract the tridiagonal, absorbing subdiagonal phases into Q so the QL
  // stage sees a real matrix.
  std::vector<R> d(n), e(n > 1 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) d[i] = real_s(W(i, i));
  if constexpr (is_complex_v<T>) {
    T s_prev{1};
    for (std::size_t i = 1; i < n; ++i) {
      const T z = W(i, i - 1) * s_prev;
      const R az = abs_s(z);
      T s_i;
      if (az > 0) {
        s_i = z / az;
        e[i - 1] = az;
      } else {
        s_i = s_prev;
        e[i - 1] = 0;
      }
      if (s_i != T{1}) {
        T* qi = Q.col(i);
        for (std::size_t r = 0; r < n; ++r) qi[r] *= s_i;
      }
      s_prev = s_i;
    }
  } else {
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = real_s(W(i, i - 1));
  }

  detail::tridiag_ql<T>(d, e, Q);

  // stable ascending sort, ties keep pre-sort order
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  out.values.resize(n);
  out.vectors = DenseMatrix<T>(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = d[idx[j]];
    const T* src = Q.col(idx[j]);
    T* dst = out.vectors.col(j);
    for (std::size_t i = 0; i < n; ++i) dst[i] = src[i];
  }
  return out;
}

}  // namespace mpeig
