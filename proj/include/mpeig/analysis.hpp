#pragma once

#include <cstddef>

#include "mpeig/dense_kernels.hpp"
#include "mpeig/dense_matrix.hpp"
#include "mpeig/precond.hpp"
#include "mpeig/small_eig.hpp"

namespace mpeig::analysis {

// gamma_n = n*u / (1 - n*u); requires n*u < 1
double gamma_n(std::size_t n, double u);

// Backward error of a rounded Hermitian apply: sqrt(n) * gamma_n
double epsilon_A(std::size_t n, double u_h);

// Normwise error of a computed residual A*x - rho*x relative to
// (||A|| + |rho|) ||x||:
//   (gamma_n + eps_A + gamma_n*eps_A + (n+1) u_h) (1 + u_h) / (1 - 2 n u_h)
//     + eps_A + u_h
double epsilon_r(std::size_t n, double u_h, double eps_A);

// Quality bound for a Cholesky solve carried out at unit roundoff u_l:
// eps_T = 4n(3n+1) kappa(A) u_l, and ||I - A^1/2 T A^1/2|| <=
// eps_T / (1 - eps_T).  Values >= 1 say nothing, hence BoundVacuous.
double epsilon_T(std::size_t n, double kappa, double u_l);
double gamma_precond_bound(std::size_t n, double kappa, double u_l);

// beta(x) = max{ sqrt(l1*ln)/(rho-l1), sqrt(l2*ln)/(l2-rho) } for
// rho = rho(x) strictly inside (l1, l2)
double beta(double rho, double lambda1, double lambda2, double lambdan);

// Effective contraction parameter of one preconditioned step:
//   gamma_precond + gamma_2 ||T||||A||
//     + beta (u_h + (1 + gamma_2) eps_r ||T||||A||)
// with gamma_2 = gamma_n(2, u_h)
double gamma_total(double gamma_precond, double norm_te_norm_a, double beta_val,
                   std::size_t n, double u_h, double eps_r);

// One-step bound on the error measure (rho-l1)/(l2-rho):
//   (gamma + (1-gamma) l1/l2)^2
double rate_bound(double gamma, double lambda1, double lambda2);

// Smallest eigenvalue error the finite-precision iteration can certify:
//   sqrt(l1*ln) (u_h + (1+gamma_2) eps_r ||T||||A||)
//     / (1 - gamma_precond - gamma_2 ||T||||A||)
double accuracy_floor(double gamma_precond, double norm_te_norm_a, std::size_t n,
                      double u_h, double eps_r, double lambda1, double lambdan);

// ||M||_2 by way of the dense eigensolver on M^*M (measurement helper for
// small operators; O(n^3), intended for n in the low hundreds).
template <class T>
double operator_norm_2(const DenseMatrix<T>& M) {
  const DenseMatrix<T> G = adjoint_matmul(M, M);
  const EigDecomposition<T> e = small_herm_eig(G);
  const double lmax = e.values.empty() ? 0.0 : static_cast<double>(e.values.back());
  return std::sqrt(lmax > 0 ? lmax : 0.0);
}

// Densify the action of a preconditioner: columns of T_E = P applied to I.
template <class T>
DenseMatrix<T> densify_preconditioner(const Preconditioner<T>& P) {
  return P.apply(DenseMatrix<T>::identity(P.n()));
}

// gamma = ||I - A^1/2 T_E A^1/2||_2, measured by densifying the actual
// preconditioner application (so every rounding inside the solve chain is
// included).
template <class T>
double measure_gamma_precond(const DenseMatrix<T>& A, const Preconditioner<T>& P) {
  if (A.rows() != A.cols())
    throw DimensionMismatch("measure_gamma_precond: A not square");
  if (A.rows() != P.n())
    throw DimensionMismatch("measure_gamma_precond: preconditioner size differs");
  const EigDecomposition<T> ea = small_herm_eig(A);
  if (!ea.values.empty() && !(ea.values.front() > 0))
    throw NotPositiveDefinite(0, "measure_gamma_precond: A is not positive definite");
  const std::size_t n = A.rows();
  // A^1/2 = V diag(sqrt(lambda)) V^*
  DenseMatrix<T> vs = ea.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    const real_t<T> s = std::sqrt(ea.values[j]);
    for (std::size_t i = 0; i < n; ++i) vs(i, j) *= s;
  }
  const DenseMatrix<T> Ahalf = matmul(vs, ea.vectors.adjoint());
  const DenseMatrix<T> TAhalf = P.apply(Ahalf);
  DenseMatrix<T> G = matmul(Ahalf, TAhalf);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      G(i, j) = (i == j ? T{1} : T{}) - G(i, j);
  return operator_norm_2(G);
}

// Everything the CLI reports under --bounds.
struct BoundReport {
  std::size_t n = 0;
  double kappa = 0;
  double eps_A = 0;
  double eps_r = 0;
  double eps_T = 0;            // 0 when vacuous
  bool eps_T_vacuous = false;
  double gamma_precond_meas = 0;
  double norm_te_norm_a = 0;
  double beta_mid = 0;         // beta at rho = (l1+l2)/2, a representative point
  double gamma_total_mid = 0;
  double rate_mid = 0;
  double floor = 0;
};

}  // namespace mpeig::analysis
