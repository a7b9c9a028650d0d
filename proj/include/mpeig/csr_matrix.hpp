#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "mpeig/dense_matrix.hpp"
#include "mpeig/errors.hpp"
#include "mpeig/precision.hpp"

namespace mpeig {

using index_t = std::int64_t;

template <class T>
struct Triplet {
  index_t row;
  index_t col;
  T value;
};

// Compressed sparse rows with the full (both triangles) pattern for
// Hermitian operands.  Column indices are sorted within each row.
template <class T>
class CsrMatrix {
 public:
  using scalar_type = T;

  CsrMatrix() = default;

  static CsrMatrix from_triplets(std::size_t n, std::vector<Triplet<T>> entries) {
    for (const auto& t : entries)
      if (t.row < 0 || t.col < 0 || t.row >= static_cast<index_t>(n) ||
          t.col >= static_cast<index_t>(n))
        throw DimensionMismatch("from_triplets: index out of range");
    std::sort(entries.begin(), entries.end(),
              [](const Triplet<T>& a, const Triplet<T>& b) {
                return a.row != b.row ? a.row < b.row : a.col < b.col;
              });
    CsrMatrix A;
    A.n_ = n;
    A.row_ptr_.assign(n + 1, 0);
    for (std::size_t i = 0; i < entries.size();) {
      std::size_t j = i + 1;
      T sum = entries[i].value;
      while (j < entries.size() && entries[j].row == entries[i].row &&
             entries[j].col == entries[i].col) {
        sum += entries[j].value;  // duplicates accumulate
        ++j;
      }
      A.col_idx_.push_back(entries[i].col);
      A.values_.push_back(sum);
      ++A.row_ptr_[entries[i].row + 1];
      i = j;
    }
    for (std::size_t r = 0; r < n; ++r) A.row_ptr_[r + 1] += A.row_ptr_[r];
    return A;
  }

  static CsrMatrix identity(std::size_t n) {
    std::vector<Triplet<T>> t;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      t.push_back({static_cast<index_t>(i), static_cast<index_t>(i), T{1}});
    return from_triplets(n, std::move(t));
  }

  std::size_t n() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  static constexpr Field field() { return scalar_traits<T>::field; }
  static constexpr Precision precision() { return scalar_traits<T>::precision; }

  const std::vector<index_t>& row_ptr() const { return row_ptr_; }
  const std::vector<index_t>& col_idx() const { return col_idx_; }
  const std::vector<T>& values() const { return values_; }
  std::vector<T>& values() { return values_; }

  DenseMatrix<T> densify() const {
    DenseMatrix<T> D(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (index_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
        D(i, col_idx_[p]) = values_[p];
    return D;
  }

  // B = A(p,p): entry (i,j) of the result is A(perm[i], perm[j])
  CsrMatrix permuted(const std::vector<index_t>& perm) const {
    if (perm.size() != n_) throw DimensionMismatch("permuted: wrong perm length");
    std::vector<index_t> inv(n_);
    for (std::size_t k = 0; k < n_; ++k) inv[perm[k]] = static_cast<index_t>(k);
    std::vector<Triplet<T>> t;
    t.reserve(nnz());
    for (std::size_t i = 0; i < n_; ++i)
      for (index_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
        t.push_back({inv[i], inv[col_idx_[p]], values_[p]});
    return from_triplets(n_, std::move(t));
  }

  // pattern symmetric and values conjugate-paired, within tol per entry
  bool is_hermitian(real_t<T> tol = 0) const {
    for (std::size_t i = 0; i < n_; ++i)
      for (index_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
        const index_t j = col_idx_[p];
        const T* mirror = find(static_cast<std::size_t>(j), static_cast<index_t>(i));
        if (!mirror) return false;
        if (abs_s(*mirror - conj_s(values_[p])) > tol) return false;
      }
    return true;
  }

  // pointer to A(i,j) or null
  const T* find(std::size_t i, index_t j) const {
    const index_t* first = col_idx_.data() + row_ptr_[i];
    const index_t* last = col_idx_.data() + row_ptr_[i + 1];
    const index_t* it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return nullptr;
    return values_.data() + (it - col_idx_.data());
  }

  real_t<T> frobenius_norm() const {
    real_t<T> s = 0;
    for (const T& v : values_) {
      const real_t<T> a = abs_s(v);
      s += a * a;
    }
    return std::sqrt(s);
  }

 private:
  std::size_t n_ = 0;
  std::vector<index_t> row_ptr_;
  std::vector<index_t> col_idx_;
  std::vector<T> values_;
};

template <class T>
CsrMatrix<lower_t<T>> to_lower(const CsrMatrix<T>& A) {
  static_assert(precision_v<T> == Precision::Working,
                "to_lower expects a working-precision matrix");
  std::vector<Triplet<lower_t<T>>> t;
  t.reserve(A.nnz());
  for (std::size_t i = 0; i < A.n(); ++i)
    for (index_t p = A.row_ptr()[i]; p < A.row_ptr()[i + 1]; ++p)
      t.push_back({static_cast<index_t>(i), A.col_idx()[p], to_lower(A.values()[p])});
  return CsrMatrix<lower_t<T>>::from_triplets(A.n(), std::move(t));
}

}  // namespace mpeig
