#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "mpeig/csr_matrix.hpp"
#include "mpeig/dense_kernels.hpp"
#include "mpeig/dense_matrix.hpp"
#include "mpeig/norm_estimate.hpp"
#include "mpeig/rcm.hpp"
#include "mpeig/sparse_kernels.hpp"

namespace mpeig {

// Cholesky-based preconditioner T = Pi L^-* L^-1 Pi^*, with the factor held
// in either precision.  Applying it converts the block to the build
// precision, runs both triangular solves there, and converts back, so a
// lower-precision factor gives the usual cheap-but-rounded solve.
//
// A breakdown while factoring in lower precision gets one retry with
// 10*u_l*||A||_est added to the diagonal (an indefinite-looking matrix at
// binary32 is often just condition number, not true indefiniteness).
template <class T>
class Preconditioner {
  static_assert(precision_v<T> == Precision::Working,
                "preconditioners are built from working-precision matrices");
  using L = lower_t<T>;

 public:
  enum class Kind { DenseChol, SparseCholKind, ExactInverseShadow };

  static Preconditioner build(const DenseMatrix<T>& A, Precision prec) {
    Preconditioner P;
    P.kind_ = Kind::DenseChol;
    P.prec_ = prec;
    P.n_ = A.rows();
    if (prec == Precision::Working) {
      P.dense_w_ = dense_cholesky(A);
      return P;
    }
    try {
      P.dense_l_ = dense_cholesky(to_lower(A));
    } catch (const NotPositiveDefinite&) {
      P.retry_dense(A);
    } catch (const OverflowError&) {
      P.retry_dense(A);
    }
    return P;
  }

  // Sparse build; the fill-reducing ordering is computed here unless the
  // caller supplies one (possibly the identity, when the system was already
  // permuted upstream).
  static Preconditioner build(const CsrMatrix<T>& A, Precision prec) {
    return build(A, prec, rcm_ordering(A));
  }

  static Preconditioner build(const CsrMatrix<T>& A, Precision prec,
                              std::vector<index_t> perm) {
    Preconditioner P;
    P.kind_ = Kind::SparseCholKind;
    P.prec_ = prec;
    P.n_ = A.n();
    if (prec == Precision::Working) {
      P.sparse_w_ = sparse_cholesky(A, std::move(perm));
      return P;
    }
    try {
      P.sparse_l_ = sparse_cholesky(to_lower(A), perm);
    } catch (const NotPositiveDefinite&) {
      P.retry_sparse(A, std::move(perm));
    } catch (const OverflowError&) {
      P.retry_sparse(A, std::move(perm));
    }
    return P;
  }

  // Working-precision inverse for analysis runs: numerically as close to
  // A^-1 as a factored solve gets.  Not reachable from the benchmark
  // variants.
  static Preconditioner exact_inverse_shadow(const DenseMatrix<T>& A) {
    Preconditioner P;
    P.kind_ = Kind::ExactInverseShadow;
    P.prec_ = Precision::Working;
    P.n_ = A.rows();
    P.dense_w_ = dense_cholesky(A);
    return P;
  }

  // working-precision residuals in, working-precision directions out
  DenseMatrix<T> apply(const DenseMatrix<T>& R) const {
    if (R.rows() != n_) throw DimensionMismatch("precond apply: wrong row count");
    if (kind_ == Kind::SparseCholKind) {
      if (prec_ == Precision::Working) return sparse_tri_solve(*sparse_w_, R, true);
      return to_working(sparse_tri_solve(*sparse_l_, to_lower(R), true));
    }
    if (prec_ == Precision::Working) return dense_solve(*dense_w_, R);
    return to_working(dense_solve(*dense_l_, to_lower(R)));
  }

  // lower-precision path for the all-lower solver stage
  DenseMatrix<L> apply_lower(const DenseMatrix<L>& R) const {
    if (prec_ != Precision::Lower)
      throw ConfigError("precond apply_lower: factor was built at working precision");
    if (R.rows() != n_) throw DimensionMismatch("precond apply: wrong row count");
    if (kind_ == Kind::SparseCholKind) return sparse_tri_solve(*sparse_l_, R, true);
    return dense_solve(*dense_l_, R);
  }

  Kind kind() const { return kind_; }
  Precision build_precision() const { return prec_; }
  double shift_applied() const { return shift_; }
  std::size_t n() const { return n_; }
  std::size_t factor_nnz() const {
    if (kind_ != Kind::SparseCholKind) return n_ * (n_ + 1) / 2;
    return prec_ == Precision::Working ? sparse_w_->nnz_L : sparse_l_->nnz_L;
  }

 private:
  template <class S>
  static DenseMatrix<S> dense_solve(const DenseMatrix<S>& fac,
                                    const DenseMatrix<S>& R) {
    DenseMatrix<S> y = tri_solve(fac, R, TriMode::Forward);
    return tri_solve(fac, y, TriMode::BackwardAdjoint);
  }

  double retry_shift(const DenseMatrix<T>& A) {
    BlockOperator<T> op = [&A](const DenseMatrix<T>& X) { return matmul(A, X); };
    return 10.0 * kUnitRoundoffLower *
           spectral_norm_estimate<T>(op, A.rows(), 8, kShiftSeed);
  }

  double retry_shift(const CsrMatrix<T>& A) {
    BlockOperator<T> op = [&A](const DenseMatrix<T>& X) { return spmv_block(A, X); };
    return 10.0 * kUnitRoundoffLower *
           spectral_norm_estimate<T>(op, A.n(), 8, kShiftSeed);
  }

  void retry_dense(const DenseMatrix<T>& A) {
    shift_ = retry_shift(A);
    DenseMatrix<T> As = A;
    for (std::size_t i = 0; i < As.rows(); ++i)
      As(i, i) += static_cast<T>(shift_);
    dense_l_ = dense_cholesky(to_lower(As));
  }

  void retry_sparse(const CsrMatrix<T>& A, std::vector<index_t> perm) {
    shift_ = retry_shift(A);
    CsrMatrix<T> As = A;
    for (std::size_t i = 0; i < As.n(); ++i) {
      const T* d = As.find(i, static_cast<index_t>(i));
      if (!d)
        throw NotPositiveDefinite(i, "precond: missing diagonal entry at " +
                                         std::to_string(i));
      As.values()[d - As.values().data()] += static_cast<T>(shift_);
    }
    sparse_l_ = sparse_cholesky(to_lower(As), std::move(perm));
  }

  static constexpr std::uint64_t kShiftSeed = 0x5eed0123;

  Kind kind_ = Kind::DenseChol;
  Precision prec_ = Precision::Working;
  std::size_t n_ = 0;
  double shift_ = 0;
  std::optional<DenseMatrix<T>> dense_w_;
  std::optional<DenseMatrix<L>> dense_l_;
  std::optional<SparseChol<T>> sparse_w_;
  std::optional<SparseChol<L>> sparse_l_;
};

}  // namespace mpeig
