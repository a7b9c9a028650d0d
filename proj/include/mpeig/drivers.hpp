#pragma once

#include <type_traits>
#include <utility>

#include "mpeig/eigensolvers.hpp"

namespace mpeig {

namespace detail {

template <class T>
std::size_t dim_of(const DenseMatrix<T>& A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("solve: matrix not square");
  return A.rows();
}

template <class T>
std::size_t dim_of(const CsrMatrix<T>& A) {
  return A.n();
}

template <class T>
BlockOperator<T> op_of(const DenseMatrix<T>& A) {
  return [&A](const DenseMatrix<T>& X) { return herm_product(A, X); };
}

template <class T>
BlockOperator<T> op_of(const CsrMatrix<T>& A) {
  return [&A](const DenseMatrix<T>& X) { return spmv_block(A, X); };
}

template <class T>
DenseMatrix<T> unpermute_rows(const DenseMatrix<T>& X,
                              const std::vector<index_t>& p) {
  if (p.empty()) return X;
  DenseMatrix<T> Y(X.rows(), X.cols());
  for (std::size_t j = 0; j < X.cols(); ++j)
    for (std::size_t i = 0; i < X.rows(); ++i) Y(p[i], j) = X(i, j);
  return Y;
}

template <class T>
void finalize_from_stage(EigResult<T>& out, StageOutcome<T>&& st, std::size_t k) {
  out.converged = st.converged;
  out.theta.clear();
  out.residual_norms.clear();
  for (std::size_t j = 0; j < k; ++j) {
    out.theta.push_back(static_cast<double>(st.theta[j]));
    out.residual_norms.push_back(static_cast<double>(st.residual_norms[j]));
  }
  out.X = st.X.slice_cols(0, k);
}

// All four variants on a fixed system with a prebuilt preconditioner.
// `A_lower` is only touched by the mixed variant.
template <class MatT, class MatLowT>
EigResult<typename MatT::scalar_type> run_variant(
    const MatT& A, const MatLowT* A_lower, const SolverConfig& cfg,
    const Preconditioner<typename MatT::scalar_type>& P,
    const DenseMatrix<typename MatT::scalar_type>& X0, double a_norm_est) {
  using T = typename MatT::scalar_type;
  using L = lower_t<T>;
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  const std::size_t n = dim_of(A);

  if (cfg.variant == Variant::PINVIT) {
    EigResult<T> r = pinvit<T>(op_of(A), n, X0, cfg, P, a_norm_est);
    r.timings.total = seconds_since(t_start);
    return r;
  }

  EigResult<T> out;
  out.a_norm_estimate = a_norm_est;
  out.precond_shift = P.shift_applied();

  DenseMatrix<T> X = X0;
  if (cfg.variant == Variant::MPLOBPCG_schol) {
    // stage 1: the whole iteration in lower precision, to the loose
    // tolerance; its block seeds the working-precision stage
    StageOptions lo;
    lo.tol = cfg.lower_tol;
    lo.use_mixed_qr = false;
    lo.stagnation_exit = true;
    lo.tag = Precision::Lower;
    BlockOperator<L> precond_lo = [&P](const DenseMatrix<L>& R) {
      return P.apply_lower(R);
    };
    StageOutcome<L> st1 =
        lobpcg_stage<L>(op_of(*A_lower), n, to_lower(X), cfg, precond_lo,
                        a_norm_est, lo, out.history, out.timings);
    out.iterations_lower = st1.iterations;
    // a stalled or capped first stage still hands over its best block
    X = detail::orthonormal_q(to_working(st1.X), true);
  }

  StageOptions hi;
  hi.tol = cfg.tol;
  hi.use_mixed_qr = cfg.variant == Variant::MPLOBPCG_schol;
  hi.tag = Precision::Working;
  BlockOperator<T> precond_hi = [&P](const DenseMatrix<T>& R) {
    return P.apply(R);
  };
  StageOutcome<T> st = lobpcg_stage<T>(op_of(A), n, X, cfg, precond_hi,
                                       a_norm_est, hi, out.history, out.timings);
  out.iterations_working = st.iterations;
  finalize_from_stage(out, std::move(st), cfg.k);
  out.timings.total = seconds_since(t_start);
  return out;
}

template <class T>
Precision build_precision_for(Variant v) {
  return v == Variant::DLOBPCG_dchol ? Precision::Working : Precision::Lower;
}

}  // namespace detail

// Two-stage driver on an explicit initial block (no system permutation; a
// sparse preconditioner carries its own ordering).
template <class T>
EigResult<T> mixed_lobpcg(const DenseMatrix<T>& A, const DenseMatrix<T>& X0,
                          SolverConfig cfg) {
  cfg.variant = Variant::MPLOBPCG_schol;
  cfg.validate(detail::dim_of(A));
  const auto t0 = std::chrono::steady_clock::now();
  const Preconditioner<T> P = Preconditioner<T>::build(A, Precision::Lower);
  const double t_factor = detail::seconds_since(t0);
  const double est = spectral_norm_estimate<T>(
      detail::op_of(A), A.rows(), cfg.sketch_rows, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const DenseMatrix<lower_t<T>> Al = to_lower(A);
  EigResult<T> r = detail::run_variant(A, &Al, cfg, P, X0, est);
  r.timings.factorize = t_factor;
  return r;
}

template <class T>
EigResult<T> mixed_lobpcg(const CsrMatrix<T>& A, const DenseMatrix<T>& X0,
                          SolverConfig cfg) {
  cfg.variant = Variant::MPLOBPCG_schol;
  cfg.validate(detail::dim_of(A));
  const auto t0 = std::chrono::steady_clock::now();
  const Preconditioner<T> P = Preconditioner<T>::build(A, Precision::Lower);
  const double t_factor = detail::seconds_since(t0);
  const double est = spectral_norm_estimate<T>(
      detail::op_of(A), A.n(), cfg.sketch_rows, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const CsrMatrix<lower_t<T>> Al = to_lower(A);
  EigResult<T> r = detail::run_variant(A, &Al, cfg, P, X0, est);
  r.timings.factorize = t_factor;
  return r;
}

// Entry point used by the benchmark tool: default random start, the
// variant's preconditioner precision, and (for sparse systems) one upfront
// bandwidth-reducing permutation so the factor solves skip gather/scatter.
// Eigenvectors come back in the original row order.
template <class T>
EigResult<T> solve(const DenseMatrix<T>& A, const SolverConfig& cfg) {
  const std::size_t n = detail::dim_of(A);
  cfg.validate(n);
  const auto t0 = std::chrono::steady_clock::now();
  const Preconditioner<T> P = Preconditioner<T>::build(
      A, detail::build_precision_for<T>(cfg.variant));
  const double t_factor = detail::seconds_since(t0);
  const double est = spectral_norm_estimate<T>(
      detail::op_of(A), n, cfg.sketch_rows, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const DenseMatrix<T> X0 = detail::orthonormal_q(
      gaussian_matrix<T>(n, cfg.block_size(), cfg.seed), true);

  EigResult<T> r;
  if (cfg.variant == Variant::MPLOBPCG_schol) {
    const DenseMatrix<lower_t<T>> Al = to_lower(A);
    r = detail::run_variant(A, &Al, cfg, P, X0, est);
  } else {
    r = detail::run_variant(A, static_cast<const DenseMatrix<lower_t<T>>*>(nullptr),
                            cfg, P, X0, est);
  }
  r.timings.factorize = t_factor;
  return r;
}

template <class T>
EigResult<T> solve(const CsrMatrix<T>& A, const SolverConfig& cfg) {
  const std::size_t n = detail::dim_of(A);
  cfg.validate(n);
  const std::vector<index_t> perm = rcm_ordering(A);
  const CsrMatrix<T> As = A.permuted(perm);

  const auto t0 = std::chrono::steady_clock::now();
  const Preconditioner<T> P = Preconditioner<T>::build(
      As, detail::build_precision_for<T>(cfg.variant), {});
  const double t_factor = detail::seconds_since(t0);
  const double est = spectral_norm_estimate<T>(
      detail::op_of(As), n, cfg.sketch_rows, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const DenseMatrix<T> X0 = detail::orthonormal_q(
      gaussian_matrix<T>(n, cfg.block_size(), cfg.seed), true);

  EigResult<T> r;
  if (cfg.variant == Variant::MPLOBPCG_schol) {
    const CsrMatrix<lower_t<T>> Al = to_lower(As);
    r = detail::run_variant(As, &Al, cfg, P, X0, est);
  } else {
    r = detail::run_variant(As, static_cast<const CsrMatrix<lower_t<T>>*>(nullptr),
                            cfg, P, X0, est);
  }
  r.timings.factorize = t_factor;
  r.X = detail::unpermute_rows(r.X, perm);
  return r;
}

}  // namespace mpeig
