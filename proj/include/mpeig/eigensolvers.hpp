#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "mpeig/csr_matrix.hpp"
#include "mpeig/dense_kernels.hpp"
#include "mpeig/dense_matrix.hpp"
#include "mpeig/norm_estimate.hpp"
#include "mpeig/ortho.hpp"
#include "mpeig/precond.hpp"
#include "mpeig/small_eig.hpp"
#include "mpeig/solver_types.hpp"

namespace mpeig {

// Convergence test for the leading columns: column j counts as converged
// when ||r_j|| <= tol (||A||_est + |theta_j|) ||x_j||, and counting stops at
// the first miss so the result is always a prefix (trailing columns may
// oscillate while the sought ones settle).
template <class T>
std::size_t converged_count(double a_norm_est, const DenseMatrix<T>& X,
                            const std::vector<real_t<T>>& theta,
                            const DenseMatrix<T>& R, double tol) {
  if (X.cols() != R.cols() || X.cols() != theta.size())
    throw DimensionMismatch("converged_count: column counts differ");
  std::size_t n_c = 0;
  for (std::size_t j = 0; j < X.cols(); ++j) {
    const double rn = static_cast<double>(R.col_norm(j));
    const double xn = static_cast<double>(X.col_norm(j));
    const double thr =
        tol * (a_norm_est + std::abs(static_cast<double>(theta[j]))) * xn;
    if (rn <= thr)
      ++n_c;
    else
      break;
  }
  return n_c;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Orthonormalize a block, preferring the two-precision QR at working
// precision; any Cholesky breakdown there falls back to plain Householder.
// Rank collapse surfaces as RankDeficient for the caller to handle.
template <class T>
DenseMatrix<T> orthonormal_q(const DenseMatrix<T>& B, bool use_mixed) {
  if constexpr (precision_v<T> == Precision::Working) {
    if (use_mixed) {
      try {
        return mixed_qr(B).Q;
      } catch (const NotPositiveDefinite&) {
      } catch (const OverflowError&) {
      }
    }
    return householder_qr(B).Q;
  } else {
    (void)use_mixed;  // the lower-precision stage always uses Householder
    return householder_qr(B).Q;
  }
}

// Same, but survives rank collapse by dropping dependent columns; the drop
// count lands in the iteration record.
template <class T>
DenseMatrix<T> orthonormal_q_dropping(const DenseMatrix<T>& B, bool use_mixed,
                                      std::size_t* dropped) {
  *dropped = 0;
  try {
    return orthonormal_q(B, use_mixed);
  } catch (const RankDeficient&) {
    const real_t<T> drop_tol =
        std::sqrt(std::numeric_limits<real_t<T>>::epsilon());
    return orthonormalize_dropping(B, drop_tol, dropped);
  }
}

// Rotate X so that X^*AX is diagonal and ascending; returns the Ritz values
// and rotates AX alongside.
template <class T>
std::vector<real_t<T>> ritz_rotate(DenseMatrix<T>& X, DenseMatrix<T>& AX) {
  DenseMatrix<T> Th = adjoint_matmul(X, AX);
  for (std::size_t j = 0; j < Th.cols(); ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      const T v = (Th(i, j) + conj_s(Th(j, i))) / real_t<T>(2);
      Th(i, j) = v;
      Th(j, i) = conj_s(v);
    }
  const EigDecomposition<T> e = small_herm_eig(Th);
  X = matmul(X, e.vectors);
  AX = matmul(AX, e.vectors);
  return e.values;
}

template <class T>
DenseMatrix<T> residual_block(const DenseMatrix<T>& AX, const DenseMatrix<T>& X,
                              const std::vector<real_t<T>>& theta) {
  DenseMatrix<T> R = AX;
  for (std::size_t j = 0; j < X.cols(); ++j) {
    const T th = static_cast<T>(theta[j]);
    T* r = R.col(j);
    const T* x = X.col(j);
    for (std::size_t i = 0; i < X.rows(); ++i) r[i] -= th * x[i];
  }
  return R;
}

template <class T>
IterationRecord make_record(Precision stage, const std::vector<real_t<T>>& theta,
                            const DenseMatrix<T>& R, std::size_t n_c) {
  IterationRecord rec;
  rec.stage = stage;
  rec.n_converged = n_c;
  rec.ritz_values.reserve(theta.size());
  for (const auto t : theta) rec.ritz_values.push_back(static_cast<double>(t));
  rec.residual_norms.reserve(R.cols());
  for (std::size_t j = 0; j < R.cols(); ++j)
    rec.residual_norms.push_back(static_cast<double>(R.col_norm(j)));
  return rec;
}

}  // namespace detail

template <class T>
struct HlUpdate {
  DenseMatrix<T> X;        // S C(:,1:m)
  DenseMatrix<T> P;        // S C(:,m+1:m+p) V
  std::vector<real_t<T>> theta;
  DenseMatrix<T> c_x;      // C(:,1:m), for reusing A*S products
  DenseMatrix<T> c_pv;     // C(:,m+1:m+p) V
  bool rotation_fallback = false;
};

// Basis update in the style of Hetmaniuk and Lehoucq: the next X takes the
// m lowest Ritz vectors of the projected problem; the next P takes the
// following block of columns, rotated by the unitary QR factor of
// C(1:m, m+1:m+p)^* so that successive bases stay well conditioned.  A
// rank-deficient rotation block falls back to V = I (flagged, not fatal).
template <class T>
HlUpdate<T> hl_update(const DenseMatrix<T>& S, const DenseMatrix<T>& C,
                      const std::vector<real_t<T>>& D, std::size_t m) {
  if (S.cols() != C.rows() || C.rows() != C.cols())
    throw DimensionMismatch("hl_update: S and C do not conform");
  if (C.cols() < m) throw DimensionMismatch("hl_update: fewer columns than m");
  HlUpdate<T> out;
  out.c_x = C.slice_cols(0, m);
  const std::size_t p = std::min(m, C.cols() - m);
  out.theta.assign(D.begin(), D.begin() + m);
  if (p > 0) {
    const DenseMatrix<T> cp = C.slice_cols(m, p);
    DenseMatrix<T> top(m, p);  // C(1:m, m+1:m+p)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < m; ++i) top(i, j) = cp(i, j);
    try {
      QrFactors<T> qr = detail::householder_qr_square(top.adjoint());
      out.c_pv = matmul(cp, qr.Q);
    } catch (const RankDeficient&) {
      out.rotation_fallback = true;
      out.c_pv = cp;
    }
    out.P = matmul(S, out.c_pv);
  }
  out.X = matmul(S, out.c_x);
  return out;
}

struct StageOptions {
  double tol = 1e-12;
  bool use_mixed_qr = false;
  bool stagnation_exit = false;
  Precision tag = Precision::Working;
};

template <class T>
struct StageOutcome {
  DenseMatrix<T> X;  // full block, n x m
  std::vector<real_t<T>> theta;
  std::vector<real_t<T>> residual_norms;
  std::size_t iterations = 0;
  bool converged = false;
};

// One LOBPCG stage, run entirely in the precision of T.  X0 must have
// orthonormal columns.  Counts an iteration per basis update; returns the
// full m-column block so a later stage can take over.
template <class T>
StageOutcome<T> lobpcg_stage(const BlockOperator<T>& apply_A, std::size_t n,
                             const DenseMatrix<T>& X0, const SolverConfig& cfg,
                             const BlockOperator<T>& apply_precond,
                             double a_norm_est, const StageOptions& opt,
                             std::vector<IterationRecord>& history,
                             StageTimings& tim) {
  using R = real_t<T>;
  using clock = std::chrono::steady_clock;
  const std::size_t m = X0.cols();
  if (X0.rows() != n) throw DimensionMismatch("lobpcg_stage: X0 has wrong rows");

  StageOutcome<T> out;
  DenseMatrix<T> X = X0;
  DenseMatrix<T> AX = apply_A(X);
  std::vector<R> theta;
  {
    const auto t0 = clock::now();
    theta = detail::ritz_rotate(X, AX);
    tim.projected_eig += detail::seconds_since(t0);
  }
  DenseMatrix<T> P(n, 0), AP(n, 0);

  // stagnation guard state (used by the lower stage, where the attainable
  // residual can sit just above the stage tolerance)
  double best_metric = std::numeric_limits<double>::infinity();
  std::size_t since_improvement = 0;
  constexpr std::size_t kStagnationWindow = 40;

  for (std::size_t iter = 0;; ++iter) {
    const DenseMatrix<T> Rblk = detail::residual_block(AX, X, theta);
    const std::size_t n_c = converged_count(a_norm_est, X, theta, Rblk, opt.tol);
    IterationRecord rec = detail::make_record(opt.tag, theta, Rblk, n_c);

    if (opt.stagnation_exit) {
      double metric = 0;
      for (std::size_t j = 0; j < cfg.k && j < m; ++j) {
        const double denom =
            (a_norm_est + std::abs(static_cast<double>(theta[j]))) *
            static_cast<double>(X.col_norm(j));
        const double ratio =
            denom > 0 ? rec.residual_norms[j] / denom
                      : std::numeric_limits<double>::infinity();
        if (ratio > metric) metric = ratio;
      }
      if (metric < 0.99 * best_metric) {
        best_metric = metric;
        since_improvement = 0;
      } else {
        ++since_improvement;
      }
    }

    const bool done = n_c >= cfg.k;
    const bool out_of_iters = iter >= cfg.maxit;
    const bool stalled =
        opt.stagnation_exit && since_improvement >= kStagnationWindow;
    if (done || out_of_iters || stalled) {
      history.push_back(std::move(rec));
      out.X = std::move(X);
      out.theta = std::move(theta);
      out.residual_norms.reserve(m);
      for (std::size_t j = 0; j < m; ++j)
        out.residual_norms.push_back(static_cast<R>(Rblk.col_norm(j)));
      out.iterations = iter;
      out.converged = done;
      return out;
    }

    // new search directions: preconditioned residuals, cleaned against the
    // current basis and orthonormalized among themselves
    DenseMatrix<T> W;
    {
      const auto t0 = clock::now();
      W = apply_precond(Rblk);
      tim.precond_apply += detail::seconds_since(t0);
    }
    {
      const auto t0 = clock::now();
      const DenseMatrix<T> basis = hconcat<T>({&X, &P});
      // project + QR, twice: when the preconditioned residuals are nearly
      // inside span[X,P] the projected block is ill conditioned, and a single
      // QR leaves its span contaminated by the basis at u*kappa(W) level --
      // which the next X then inherits permanently.  After the first QR the
      // block is orthonormal, so the second round scrubs the overlap to u.
      std::size_t dropped = 0;
      W = block_project_out(W, basis, 2);
      W = detail::orthonormal_q_dropping(W, opt.use_mixed_qr, &dropped);
      if (W.cols() > 0) {
        std::size_t more = 0;
        W = block_project_out(W, basis, 1);
        W = detail::orthonormal_q_dropping(W, opt.use_mixed_qr, &more);
        dropped += more;
      }
      rec.w_columns_dropped = dropped;
      tim.orthogonalize += detail::seconds_since(t0);
    }
    if (W.cols() == 0 && P.cols() == 0) {
      history.push_back(std::move(rec));
      throw RankCollapse("lobpcg_stage: no usable search directions left");
    }

    DenseMatrix<T> AW = apply_A(W);
    const DenseMatrix<T> S = hconcat<T>({&X, &P, &W});
    const DenseMatrix<T> AS = hconcat<T>({&AX, &AP, &AW});

    const auto t0 = clock::now();
    DenseMatrix<T> Ap = adjoint_matmul(S, AS);
    for (std::size_t j = 0; j < Ap.cols(); ++j)
      for (std::size_t i = 0; i <= j; ++i) {
        const T v = (Ap(i, j) + conj_s(Ap(j, i))) / R(2);
        Ap(i, j) = v;
        Ap(j, i) = conj_s(v);
      }
    const EigDecomposition<T> pe = small_herm_eig(Ap);
    HlUpdate<T> up = hl_update(S, pe.vectors, pe.values, m);
    tim.projected_eig += detail::seconds_since(t0);
    rec.basis_rotation_fallback = up.rotation_fallback;
    history.push_back(std::move(rec));

    X = std::move(up.X);
    AX = matmul(AS, up.c_x);
    P = std::move(up.P);
    AP = up.c_pv.empty() ? DenseMatrix<T>(n, 0) : matmul(AS, up.c_pv);
    theta = std::move(up.theta);
  }
}

// Preconditioned inverse iteration on a block: orthonormalize, form Ritz
// pairs, subtract the preconditioned residual.  The whole loop runs in
// working precision; only the preconditioner is allowed to round.
template <class T>
EigResult<T> pinvit(const BlockOperator<T>& apply_A, std::size_t n,
                    const DenseMatrix<T>& X0, const SolverConfig& cfg,
                    const Preconditioner<T>& P, double a_norm_est = 0) {
  static_assert(precision_v<T> == Precision::Working,
                "pinvit iterates at working precision");
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  cfg.validate(n);
  const std::size_t m = X0.cols();
  if (m < cfg.k) throw ConfigError("pinvit: X0 has fewer columns than k");
  if (a_norm_est <= 0)
    a_norm_est = spectral_norm_estimate<T>(apply_A, n, cfg.sketch_rows,
                                           cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  EigResult<T> out;
  out.a_norm_estimate = a_norm_est;
  out.precond_shift = P.shift_applied();
  StageTimings& tim = out.timings;

  DenseMatrix<T> Xt = X0;
  for (std::size_t iter = 0;; ++iter) {
    DenseMatrix<T> X;
    {
      const auto t0 = clock::now();
      try {
        X = detail::orthonormal_q(Xt, true);
      } catch (const RankDeficient&) {
        throw RankCollapse("pinvit: iterate block lost rank");
      }
      tim.orthogonalize += detail::seconds_since(t0);
    }
    DenseMatrix<T> AX = apply_A(X);
    std::vector<real_t<T>> theta;
    {
      const auto t0 = clock::now();
      theta = detail::ritz_rotate(X, AX);
      tim.projected_eig += detail::seconds_since(t0);
    }
    const DenseMatrix<T> Rblk = detail::residual_block(AX, X, theta);
    const std::size_t n_c = converged_count(a_norm_est, X, theta, Rblk, cfg.tol);
    out.history.push_back(detail::make_record(Precision::Working, theta, Rblk, n_c));

    const bool done = n_c >= cfg.k;
    if (done || iter >= cfg.maxit) {
      out.converged = done;
      out.iterations_working = iter;
      out.theta.assign(theta.begin(), theta.begin() + cfg.k);
      out.X = X.slice_cols(0, cfg.k);
      out.residual_norms.clear();
      for (std::size_t j = 0; j < cfg.k; ++j)
        out.residual_norms.push_back(static_cast<double>(Rblk.col_norm(j)));
      tim.total = detail::seconds_since(t_start);
      return out;
    }

    DenseMatrix<T> W;
    {
      const auto t0 = clock::now();
      W = P.apply(Rblk);
      tim.precond_apply += detail::seconds_since(t0);
    }
    Xt = subtract(X, W);
  }
}

}  // namespace mpeig
