#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <complex>

#include "doctest.h"
#include "mpeig/ortho.hpp"
#include "mpeig/rayleigh_ritz.hpp"
#include "oracles.hpp"

using namespace mpeig;
using cplx = std::complex<double>;

namespace {

template <class T>
DenseMatrix<T> random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  Pcg64 rng(seed);
  DenseMatrix<T> M(r, c);
  for (std::size_t j = 0; j < c; ++j)
    for (std::size_t i = 0; i < r; ++i) {
      if constexpr (is_complex_v<T>)
        M(i, j) = T(rng.gaussian(), rng.gaussian());
      else
        M(i, j) = T(rng.gaussian());
    }
  return M;
}

}  // namespace

TEST_CASE("an exact invariant basis returns the matching eigenvalues") {
  const auto inst = oracle::spd_with_spectrum<double>({1, 2, 3, 4, 5, 6, 7, 8}, 2);
  const auto S = inst.vectors.slice_cols(0, 3);  // span of the 3 lowest
  const auto AS = matmul(inst.A, S);
  const auto rp = rayleigh_ritz(S, AS);
  REQUIRE(rp.values.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(rp.values[i] == doctest::Approx(double(i + 1)).epsilon(1e-12));
}

TEST_CASE("Ritz values interlace the spectrum from above") {
  const std::size_t n = 20, m = 6;
  const auto inst = oracle::spd_with_spectrum<double>(
      oracle::logspaced_spectrum(n, 100.0, 5), 41);
  const auto S = householder_qr(random_matrix<double>(n, m, 11)).Q;
  const auto rp = rayleigh_ritz(S, matmul(inst.A, S));
  for (std::size_t i = 0; i < m; ++i) {
    CHECK(rp.values[i] >= inst.lambda[i] * (1 - 1e-10));
    CHECK(rp.values[i] <= inst.lambda[n - m + i] * (1 + 1e-10));
  }
}

TEST_CASE("projected pairs satisfy the generalized eigen-equation") {
  const std::size_t n = 25, m = 5;
  const auto inst = oracle::spd_with_spectrum<cplx>(
      oracle::logspaced_spectrum(n, 50.0, 6), 42);
  // deliberately non-orthonormal basis: scale and mix columns
  auto S = random_matrix<cplx>(n, m, 12);
  for (std::size_t i = 0; i < n; ++i) S(i, 0) *= cplx(40.0);
  const auto AS = matmul(inst.A, S);
  const auto rp = rayleigh_ritz(S, AS);

  // C^* (S^*S) C = I
  const auto G = adjoint_matmul(S, S);
  const auto B = oracle::matmul(DenseMatrix<cplx>(rp.C.adjoint()), oracle::matmul(G, rp.C));
  CHECK(oracle::frob_diff(B, DenseMatrix<cplx>::identity(m)) <= 1e-10);

  // S^*AS C = S^*S C diag(theta)
  const auto Ap = adjoint_matmul(S, AS);
  auto RHS = oracle::matmul(G, rp.C);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) RHS(i, j) *= cplx(rp.values[j]);
  CHECK(oracle::frob_diff(oracle::matmul(Ap, rp.C), RHS) <=
        1e-10 * oracle::frob(Ap));

  // values ascend
  for (std::size_t i = 0; i + 1 < m; ++i) CHECK(rp.values[i] <= rp.values[i + 1]);
}

TEST_CASE("the Ritz block minimizes the trace over B-orthonormal slices") {
  const std::size_t n = 18, ms = 7, m = 3;
  const auto inst = oracle::spd_with_spectrum<double>(
      oracle::logspaced_spectrum(n, 30.0, 7), 43);
  const auto S = householder_qr(random_matrix<double>(n, ms, 14)).Q;
  const auto AS = matmul(inst.A, S);
  const auto rp = rayleigh_ritz(S, AS);
  double ritz_trace = 0;
  for (std::size_t i = 0; i < m; ++i) ritz_trace += rp.values[i];

  const auto Ap = adjoint_matmul(S, AS);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    // random feasible competitor: orthonormal m-column slice in the S basis
    const auto C = householder_qr(random_matrix<double>(ms, m, 100 + trial)).Q;
    const auto M = oracle::matmul(DenseMatrix<double>(C.adjoint()), oracle::matmul(Ap, C));
    double tr = 0;
    for (std::size_t i = 0; i < m; ++i) tr += M(i, i);
    CHECK(ritz_trace <= tr + 1e-10 * std::abs(tr));
  }
}

TEST_CASE("a rank-deficient basis raises RankDeficientBasis") {
  auto S = random_matrix<double>(10, 3, 15);
  for (std::size_t i = 0; i < 10; ++i) S(i, 2) = 0.0;  // Gram pivot exactly 0
  const auto AS = S;  // any conforming block; Gram fails first
  CHECK_THROWS_AS(rayleigh_ritz(S, AS), RankDeficientBasis);
}
