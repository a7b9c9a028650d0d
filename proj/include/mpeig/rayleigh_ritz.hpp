#pragma once

#include "mpeig/dense_kernels.hpp"
#include "mpeig/small_eig.hpp"

namespace mpeig {

// Ritz pairs of A restricted to span(S) for a basis that need not be
// orthonormal: factor S^*S = R^*R, solve the standard problem for
// R^{-*}(S^*AS)R^{-1}, and map coefficients back through R^{-1}. The
// returned C satisfies C^*(S^*S)C = I; Ritz vectors are S*C.
template <class T>
struct RitzPairs {
  std::vector<real_t<T>> values;
  DenseMatrix<T> C;
};

template <class T>
RitzPairs<T> rayleigh_ritz(const DenseMatrix<T>& S, const DenseMatrix<T>& AS) {
  if (S.rows() != AS.rows() || S.cols() != AS.cols())
    throw DimensionMismatch("rayleigh_ritz: S and AS must agree in shape");
  DenseMatrix<T> G = adjoint_matmul(S, S);
  hermitize(G);
  DenseMatrix<T> L;
  try {
    L = dense_cholesky(G);
  } catch (const NotPositiveDefinite&) {
    throw RankDeficientBasis("rayleigh_ritz: basis Gram matrix is not positive definite");
  }
  DenseMatrix<T> P = adjoint_matmul(S, AS);
  hermitize(P);
  // M = L^{-1} P L^{-*}, Hermitian again up to roundoff
  DenseMatrix<T> Z = tri_solve(L, P, TriMode::Forward);
  DenseMatrix<T> M = tri_solve(L.adjoint(), Z, TriMode::UpperInverseRight);
  hermitize(M);
  EigDecomposition<T> eig = small_herm_eig(M);
  RitzPairs<T> out;
  out.values = std::move(eig.values);
  // C = R^{-1} Y with R = L^*
  out.C = tri_solve(L, eig.vectors, TriMode::BackwardAdjoint);
  return out;
}

}  // namespace mpeig
