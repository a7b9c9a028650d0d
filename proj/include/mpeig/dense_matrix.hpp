#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "mpeig/errors.hpp"
#include "mpeig/precision.hpp"
#include "mpeig/rng.hpp"

namespace mpeig {

// Column-major dense matrix over float, double, complex<float> or
// complex<double>.  Field and precision are properties of the scalar type.
template <class T>
class DenseMatrix {
 public:
  using scalar_type = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T{}) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = T{1};
    return I;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  static constexpr Field field() { return scalar_traits<T>::field; }
  static constexpr Precision precision() { return scalar_traits<T>::precision; }

  T& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[j * rows_ + i];
  }

  T* col(std::size_t j) { return data_.data() + j * rows_; }
  const T* col(std::size_t j) const { return data_.data() + j * rows_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  DenseMatrix adjoint() const {
    DenseMatrix B(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) B(j, i) = conj_s((*this)(i, j));
    return B;
  }

  DenseMatrix slice_cols(std::size_t first, std::size_t count) const {
    if (first + count > cols_)
      throw DimensionMismatch("slice_cols: range exceeds column count");
    DenseMatrix B(rows_, count);
    for (std::size_t j = 0; j < count; ++j)
      for (std::size_t i = 0; i < rows_; ++i) B(i, j) = (*this)(i, first + j);
    return B;
  }

  real_t<T> frobenius_norm() const {
    real_t<T> s = 0;
    for (const T& v : data_) {
      const real_t<T> a = abs_s(v);
      s += a * a;
    }
    return std::sqrt(s);
  }

  real_t<T> col_norm(std::size_t j) const {
    real_t<T> s = 0;
    const T* c = col(j);
    for (std::size_t i = 0; i < rows_; ++i) {
      const real_t<T> a = abs_s(c[i]);
      s += a * a;
    }
    return std::sqrt(s);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
DenseMatrix<T> hconcat(std::initializer_list<const DenseMatrix<T>*> blocks) {
  std::size_t rows = 0, cols = 0;
  for (const auto* b : blocks) {
    if (b->empty()) continue;
    if (rows == 0) rows = b->rows();
    if (b->rows() != rows) throw DimensionMismatch("hconcat: row counts differ");
    cols += b->cols();
  }
  DenseMatrix<T> M(rows, cols);
  std::size_t at = 0;
  for (const auto* b : blocks) {
    if (b->empty()) continue;
    for (std::size_t j = 0; j < b->cols(); ++j, ++at)
      for (std::size_t i = 0; i < rows; ++i) M(i, at) = (*b)(i, j);
  }
  return M;
}

template <class T>
DenseMatrix<lower_t<T>> to_lower(const DenseMatrix<T>& M) {
  static_assert(precision_v<T> == Precision::Working,
                "to_lower expects a working-precision matrix");
  DenseMatrix<lower_t<T>> B(M.rows(), M.cols());
  for (std::size_t i = 0; i < M.data().size(); ++i)
    B.data()[i] = to_lower(M.data()[i]);
  return B;
}

template <class T>
DenseMatrix<working_t<T>> to_working(const DenseMatrix<T>& M) {
  static_assert(precision_v<T> == Precision::Lower,
                "to_working expects a lower-precision matrix");
  DenseMatrix<working_t<T>> B(M.rows(), M.cols());
  for (std::size_t i = 0; i < M.data().size(); ++i)
    B.data()[i] = to_working(M.data()[i]);
  return B;
}

// ||M - M^*||_F, a cheap hermiticity probe for tests and input validation.
template <class T>
real_t<T> hermitian_deviation(const DenseMatrix<T>& M) {
  if (M.rows() != M.cols())
    throw DimensionMismatch("hermitian_deviation: matrix not square");
  real_t<T> s = 0;
  for (std::size_t j = 0; j < M.cols(); ++j)
    for (std::size_t i = 0; i < M.rows(); ++i) {
      const T d = M(i, j) - conj_s(M(j, i));
      const real_t<T> a = abs_s(d);
      s += a * a;
    }
  return std::sqrt(s);
}

// Seeded standard Gaussian fill, column-major order.  Complex entries get
// independent N(0,1) real and imaginary parts.
template <class T>
DenseMatrix<T> gaussian_matrix(std::size_t rows, std::size_t cols,
                               std::uint64_t seed) {
  DenseMatrix<T> M(rows, cols);
  Pcg64 rng(seed);
  for (std::size_t idx = 0; idx < M.data().size(); ++idx) {
    if constexpr (is_complex_v<T>) {
      const auto re = rng.gaussian();
      const auto im = rng.gaussian();
      M.data()[idx] = T(static_cast<real_t<T>>(re), static_cast<real_t<T>>(im));
    } else {
      M.data()[idx] = static_cast<T>(rng.gaussian());
    }
  }
  return M;
}

}  // namespace mpeig
