#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <complex>

#include "doctest.h"
#include "mpeig/dense_kernels.hpp"
#include "mpeig/generators.hpp"
#include "mpeig/rcm.hpp"
#include "mpeig/sparse_kernels.hpp"
#include "oracles.hpp"

using namespace mpeig;

namespace {

template <class T>
std::size_t bandwidth(const CsrMatrix<T>& A) {
  std::size_t b = 0;
  for (std::size_t i = 0; i < A.n(); ++i)
    for (index_t p = A.row_ptr()[i]; p < A.row_ptr()[i + 1]; ++p) {
      const index_t d = std::abs(static_cast<index_t>(i) - A.col_idx()[p]);
      b = std::max(b, static_cast<std::size_t>(d));
    }
  return b;
}

}  // namespace

TEST_CASE("from_triplets sorts columns and accumulates duplicates") {
  std::vector<Triplet<double>> t = {
      {1, 2, 5.0}, {0, 0, 1.0}, {1, 0, 3.0}, {1, 2, 0.5}, {2, 2, 4.0}};
  const auto A = CsrMatrix<double>::from_triplets(3, t);
  CHECK(A.nnz() == 4);
  CHECK(*A.find(1, 2) == 5.5);
  CHECK(*A.find(0, 0) == 1.0);
  CHECK(A.find(0, 1) == nullptr);
  const auto& ci = A.col_idx();
  for (std::size_t i = 0; i < 3; ++i)
    for (index_t p = A.row_ptr()[i] + 1; p < A.row_ptr()[i + 1]; ++p)
      CHECK(ci[p - 1] < ci[p]);
  CHECK_THROWS_AS(CsrMatrix<double>::from_triplets(2, {{0, 5, 1.0}}),
                  DimensionMismatch);
}

TEST_CASE("spmv_block matches the densified product") {
  const auto A = gen_laplace2d(4, 3);
  const auto D = A.densify();
  Pcg64 rng(3);
  DenseMatrix<double> X(A.n(), 3);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < A.n(); ++i) X(i, j) = rng.gaussian();
  CHECK(oracle::frob_diff(spmv_block(A, X), oracle::matmul(D, X)) <= 1e-13);
}

TEST_CASE("permuted relabels rows and columns consistently") {
  const auto A = gen_laplace2d(3, 3);
  const std::vector<index_t> perm = {4, 2, 0, 8, 6, 1, 3, 5, 7};
  const auto B = A.permuted(perm);
  const auto Da = A.densify();
  const auto Db = B.densify();
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) CHECK(Db(i, j) == Da(perm[i], perm[j]));
  // undo with the inverse permutation
  std::vector<index_t> inv(9);
  for (std::size_t k = 0; k < 9; ++k) inv[perm[k]] = static_cast<index_t>(k);
  CHECK(oracle::frob_diff(B.permuted(inv).densify(), Da) == 0.0);
}

TEST_CASE("elimination tree of a tridiagonal chain is the chain itself") {
  std::vector<Triplet<double>> t;
  for (index_t i = 0; i < 5; ++i) {
    t.push_back({i, i, 2.0});
    if (i > 0) {
      t.push_back({i, i - 1, -1.0});
      t.push_back({i - 1, i, -1.0});
    }
  }
  const auto A = CsrMatrix<double>::from_triplets(5, t);
  const auto parent = elimination_tree(A);
  for (index_t i = 0; i < 4; ++i) CHECK(parent[i] == i + 1);
  CHECK(parent[4] == -1);
}

TEST_CASE("sparse_cholesky agrees with the dense factorization") {
  const auto A = gen_laplace2d(5, 4);
  const auto F = sparse_cholesky(A, {});
  const auto Ld = dense_cholesky(A.densify());
  CHECK(oracle::frob_diff(F.L.densify(), Ld) <= 1e-13 * oracle::frob(Ld));
  CHECK(F.nnz_L == F.L.nnz());
  // factor reconstructs the matrix
  const auto R = oracle::matmul(F.L.densify(), DenseMatrix<double>(F.L.densify().adjoint()));
  CHECK(oracle::frob_diff(R, A.densify()) <= 1e-13 * oracle::frob(R));
}

TEST_CASE("sparse_tri_solve applies the full inverse, permuted or not") {
  const auto A = gen_laplace2d(6, 5);
  const auto D = A.densify();
  Pcg64 rng(17);
  DenseMatrix<double> B(A.n(), 2);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < A.n(); ++i) B(i, j) = rng.gaussian();

  const auto F0 = sparse_cholesky(A, {});
  const auto Y0 = sparse_tri_solve(F0, B, true);
  CHECK(oracle::frob_diff(oracle::matmul(D, Y0), B) <= 1e-11 * oracle::frob(B));

  const auto F1 = sparse_cholesky(A, rcm_ordering(A));
  const auto Y1 = sparse_tri_solve(F1, B, true);
  CHECK(oracle::frob_diff(oracle::matmul(D, Y1), B) <= 1e-11 * oracle::frob(B));
  CHECK(oracle::frob_diff(Y0, Y1) <= 1e-10 * oracle::frob(Y0));
}

TEST_CASE("rcm_ordering is a bijection and cuts the bandwidth back down") {
  const auto A = gen_laplace2d(30, 3);  // natural bandwidth 30
  // scramble it first so RCM has something to undo
  std::vector<index_t> scramble(A.n());
  for (std::size_t i = 0; i < A.n(); ++i) scramble[i] = static_cast<index_t>(i);
  Pcg64 rng(5);
  for (std::size_t i = A.n(); i-- > 1;)
    std::swap(scramble[i], scramble[static_cast<std::size_t>(rng.uniform01() * double(i + 1))]);
  const auto B = A.permuted(scramble);

  const auto p = rcm_ordering(B);
  std::vector<char> seen(B.n(), 0);
  for (const index_t v : p) {
    REQUIRE(v >= 0);
    REQUIRE(v < static_cast<index_t>(B.n()));
    CHECK(!seen[v]);
    seen[v] = 1;
  }
  const auto C = B.permuted(p);
  CHECK(bandwidth(C) < bandwidth(B));
  CHECK(bandwidth(C) <= 8);  // near the grid's natural profile again
}

TEST_CASE("sparse factorization failures carry the row index") {
  // indefinite
  const auto A = CsrMatrix<double>::from_triplets(
      2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 1.0}});
  try {
    sparse_cholesky(A, {});
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.index == 1);
  }
  // overflow in binary32
  const auto S = CsrMatrix<float>::from_triplets(
      2, {{0, 0, 1e-38f}, {0, 1, 1e2f}, {1, 0, 1e2f}, {1, 1, 1.0f}});
  CHECK_THROWS_AS(sparse_cholesky(S, {}), OverflowInLower);
}
