#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mpeig/csr_matrix.hpp"
#include "mpeig/dense_matrix.hpp"

namespace mpeig {

// Y = A*X, row-wise: each output entry accumulates over its row's stored
// entries in ascending column order.
template <class T>
DenseMatrix<T> spmv_block(const CsrMatrix<T>& A, const DenseMatrix<T>& X) {
  if (A.n() != X.rows()) throw DimensionMismatch("spmv_block: shapes differ");
  DenseMatrix<T> Y(A.n(), X.cols());
  const auto& rp = A.row_ptr();
  const auto& ci = A.col_idx();
  const auto& vals = A.values();
  for (std::size_t c = 0; c < X.cols(); ++c) {
    const T* x = X.col(c);
    T* y = Y.col(c);
    for (std::size_t i = 0; i < A.n(); ++i) {
      T s{};
      for (index_t p = rp[i]; p < rp[i + 1]; ++p) s += vals[p] * x[ci[p]];
      y[i] = s;
    }
  }
  return Y;
}

// Elimination tree of the lower-triangular pattern (parent = -1 for roots),
// computed with the usual ancestor path compression.
template <class T>
std::vector<index_t> elimination_tree(const CsrMatrix<T>& A) {
  const std::size_t n = A.n();
  std::vector<index_t> parent(n, -1), ancestor(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (index_t p = A.row_ptr()[i]; p < A.row_ptr()[i + 1]; ++p) {
      index_t j = A.col_idx()[p];
      while (j != -1 && j < static_cast<index_t>(i)) {
        const index_t next = ancestor[j];
        ancestor[j] = static_cast<index_t>(i);
        if (next == -1) parent[j] = static_cast<index_t>(i);
        j = next;
      }
    }
  }
  return parent;
}

template <class T>
struct SparseChol {
  std::vector<index_t> perm;    // position k of the factored system holds
                                // original index perm[k]; empty means identity
  CsrMatrix<T> L;               // lower-triangular factor of A(p,p)
  std::vector<index_t> parent;  // elimination tree
  std::size_t nnz_L = 0;
};

namespace detail {

// Pattern of row i of L: indices reachable in the etree from row i's
// lower-triangle entries, returned in ascending order (a valid elimination
// order, since etree parents always carry larger indices).
inline void ereach(std::size_t i, const std::vector<index_t>& row_ptr,
                   const std::vector<index_t>& col_idx,
                   const std::vector<index_t>& parent, std::vector<char>& mark,
                   std::vector<index_t>& out) {
  out.clear();
  const index_t ii = static_cast<index_t>(i);
  mark[i] = 1;
  for (index_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
    index_t j = col_idx[p];
    if (j >= ii) continue;
    while (j != -1 && j < ii && !mark[j]) {
      mark[j] = 1;
      out.push_back(j);
      j = parent[j];
    }
  }
  std::sort(out.begin(), out.end());
  for (const index_t j : out) mark[j] = 0;
  mark[i] = 0;
}

}  // namespace detail

// Up-looking sparse Cholesky of A(p,p) = L L^*.  The symbolic phase walks
// the elimination tree (ereach) per row; the numeric phase solves one sparse
// triangular system per row against the rows already built, accumulating in
// ascending column order throughout.
template <class T>
SparseChol<T> sparse_cholesky(const CsrMatrix<T>& A, std::vector<index_t> perm) {
  using R = real_t<T>;
  const std::size_t n = A.n();
  if (!perm.empty() && perm.size() != n)
    throw DimensionMismatch("sparse_cholesky: bad permutation length");
  const CsrMatrix<T> B = perm.empty() ? A : A.permuted(perm);

  SparseChol<T> F;
  F.perm = std::move(perm);
  F.parent = elimination_tree(B);

  const auto& rp = B.row_ptr();
  const auto& ci = B.col_idx();
  const auto& bv = B.values();

  std::vector<index_t> lp;  // row_ptr of L under construction
  std::vector<index_t> li;
  std::vector<T> lv;
  lp.reserve(n + 1);
  lp.push_back(0);

  std::vector<T> x(n, T{});          // dense scratch for the current row
  std::vector<char> mark(n, 0);
  std::vector<index_t> pattern;
  std::vector<index_t> diag_at(n);   // position of L(j,j) within L's storage
  std::vector<index_t> row_of(n);    // row start, for iterating row j of L

  for (std::size_t i = 0; i < n; ++i) {
    detail::ereach(i, rp, ci, F.parent, mark, pattern);

    // scatter the lower part of row i of B
    for (index_t p = rp[i]; p < rp[i + 1]; ++p)
      if (ci[p] <= static_cast<index_t>(i)) x[ci[p]] = bv[p];

    // x[j] = (x[j] - sum_{k<j} x[k] conj(L(j,k))) / L(j,j), j ascending
    R sq = 0;
    for (const index_t j : pattern) {
      T s = x[j];
      for (index_t p = row_of[j]; p < diag_at[j]; ++p) s -= x[li[p]] * conj_s(lv[p]);
      const T ljj = lv[diag_at[j]];
      const T xij = s / real_s(ljj);
      x[j] = xij;
      const R a = abs_s(xij);
      sq += a * a;
    }

    const R dii = real_s(x[i]) - sq;
    if (!std::isfinite(static_cast<double>(dii)))
      throw OverflowInLower(i, "sparse_cholesky: row " + std::to_string(i) +
                                   " overflowed");
    if (!(dii > 0))
      throw NotPositiveDefinite(i, "sparse_cholesky: nonpositive pivot at row " +
                                       std::to_string(i));

    row_of[i] = static_cast<index_t>(li.size());
    for (const index_t j : pattern) {
      li.push_back(j);
      lv.push_back(x[j]);
      x[j] = T{};
    }
    diag_at[i] = static_cast<index_t>(li.size());
    li.push_back(static_cast<index_t>(i));
    lv.push_back(static_cast<T>(std::sqrt(dii)));
    x[i] = T{};
    lp.push_back(static_cast<index_t>(li.size()));
  }

  // assemble the CSR factor
  std::vector<Triplet<T>> t;
  t.reserve(lv.size());
  for (std::size_t i = 0; i < n; ++i)
    for (index_t p = lp[i]; p < lp[i + 1]; ++p)
      t.push_back({static_cast<index_t>(i), li[p], lv[p]});
  F.L = CsrMatrix<T>::from_triplets(n, std::move(t));
  F.nnz_L = F.L.nnz();
  return F;
}

// Apply (Pi L^-* L^-1 Pi^*) to the columns of B.  With apply_perm false the
// permutation is skipped, for callers that already permuted their system.
template <class T>
DenseMatrix<T> sparse_tri_solve(const SparseChol<T>& F, const DenseMatrix<T>& B,
                                bool apply_perm) {
  const std::size_t n = F.L.n();
  if (B.rows() != n) throw DimensionMismatch("sparse_tri_solve: shapes differ");
  const auto& rp = F.L.row_ptr();
  const auto& ci = F.L.col_idx();
  const auto& lv = F.L.values();

  for (std::size_t i = 0; i < n; ++i) {
    const index_t dp = rp[i + 1] - 1;  // diagonal is the last entry of row i
    const real_t<T> a = abs_s(lv[dp]);
    if (a == 0 || a < std::numeric_limits<real_t<T>>::min())
      throw SingularTriangular(i, "sparse_tri_solve: bad diagonal at " +
                                      std::to_string(i));
  }

  const bool use_perm = apply_perm && !F.perm.empty();
  DenseMatrix<T> Y(n, B.cols());
  std::vector<T> y(n);
  for (std::size_t c = 0; c < B.cols(); ++c) {
    const T* b = B.col(c);
    if (use_perm)
      for (std::size_t k = 0; k < n; ++k) y[k] = b[F.perm[k]];
    else
      for (std::size_t k = 0; k < n; ++k) y[k] = b[k];

    // forward: L z = y (rows ascending; diagonal stored last per row)
    for (std::size_t i = 0; i < n; ++i) {
      T s = y[i];
      for (index_t p = rp[i]; p < rp[i + 1] - 1; ++p) s -= lv[p] * y[ci[p]];
      y[i] = s / real_s(lv[rp[i + 1] - 1]);
    }
    // backward: L^* w = z, column-oriented over the rows of L in reverse
    for (std::size_t i = n; i-- > 0;) {
      const index_t dp = rp[i + 1] - 1;
      y[i] /= real_s(lv[dp]);
      const T yi = y[i];
      for (index_t p = rp[i]; p < dp; ++p) y[ci[p]] -= conj_s(lv[p]) * yi;
    }

    T* out = Y.col(c);
    if (use_perm)
      for (std::size_t k = 0; k < n; ++k) out[F.perm[k]] = y[k];
    else
      for (std::size_t k = 0; k < n; ++k) out[k] = y[k];
  }
  return Y;
}

}  // namespace mpeig
