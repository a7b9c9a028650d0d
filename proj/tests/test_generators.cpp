#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "mpeig/dense_kernels.hpp"
#include "mpeig/generators.hpp"
#include "mpeig/rng.hpp"
#include "oracles.hpp"

using namespace mpeig;
using cplx = std::complex<double>;

TEST_CASE("laplace2d sparsity: 5*n - 2*(nx+ny) nonzeros") {
  Pcg64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nx = 1 + std::size_t(rng.uniform01() * 12);
    const std::size_t ny = 1 + std::size_t(rng.uniform01() * 12);
    const auto A = gen_laplace2d(nx, ny);
    CHECK(A.n() == nx * ny);
    CHECK(A.nnz() == 5 * nx * ny - 2 * (nx + ny));
    CHECK(A.is_hermitian());
  }
  // the large instance pinned by the protocol
  const auto L = gen_laplace2d(5, 5000);
  CHECK(L.n() == 25000);
  CHECK(L.nnz() == 114990);
}

TEST_CASE("laplace2d eigenvalues match the sine formula and the matrix") {
  const std::size_t nx = 3, ny = 4;
  const auto vals = laplace2d_eigenvalues(nx, ny);
  REQUIRE(vals.size() == nx * ny);
  for (std::size_t i = 0; i + 1 < vals.size(); ++i) CHECK(vals[i] <= vals[i + 1]);
  // against the densified operator
  const auto ref = oracle::sym_eigenvalues(gen_laplace2d(nx, ny).densify());
  for (std::size_t i = 0; i < vals.size(); ++i)
    CHECK(vals[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  // and against a direct evaluation of 4sin^2 terms
  std::vector<double> direct;
  for (std::size_t i = 1; i <= nx; ++i)
    for (std::size_t j = 1; j <= ny; ++j) {
      const double si = std::sin(double(i) * std::numbers::pi / (2.0 * double(nx + 1)));
      const double sj = std::sin(double(j) * std::numbers::pi / (2.0 * double(ny + 1)));
      direct.push_back(4 * si * si + 4 * sj * sj);
    }
  std::sort(direct.begin(), direct.end());
  for (std::size_t i = 0; i < vals.size(); ++i)
    CHECK(vals[i] == doctest::Approx(direct[i]).epsilon(1e-13));
  // 1x1 grid: the stencil is just the diagonal 4
  const auto one = laplace2d_eigenvalues(1, 1);
  CHECK(one.size() == 1);
  CHECK(one[0] == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("gaussian kernel: unit diagonal, bit-exact symmetry, determinism") {
  const auto r1 = gen_kernel(KernelKind::Gaussian, 64, 7);
  const auto r2 = gen_kernel(KernelKind::Gaussian, 64, 7);
  const auto r3 = gen_kernel(KernelKind::Gaussian, 64, 8);
  CHECK(r1.shift == 0.0);
  for (std::size_t i = 0; i < 64; ++i) CHECK(r1.K(i, i) == 1.0);
  bool identical = true, different = false;
  for (std::size_t j = 0; j < 64; ++j)
    for (std::size_t i = 0; i < 64; ++i) {
      CHECK(r1.K(i, j) == r1.K(j, i));  // bit-exact
      CHECK(r1.K(i, j) > 0.0);
      CHECK(r1.K(i, j) <= 1.0);
      identical = identical && r1.K(i, j) == r2.K(i, j);
      different = different || r1.K(i, j) != r3.K(i, j);
    }
  CHECK(identical);
  CHECK(different);
  CHECK_NOTHROW(dense_cholesky(r1.K));
}

TEST_CASE("polynomial kernel is PD after its recorded shift") {
  const auto r = gen_kernel(KernelKind::Polynomial, 48, 3);
  CHECK(r.shift >= 0.0);
  for (std::size_t j = 0; j < 48; ++j)
    for (std::size_t i = 0; i < 48; ++i) CHECK(r.K(i, j) == r.K(j, i));
  for (std::size_t i = 0; i < 48; ++i) CHECK(r.K(i, i) >= 1.0);
  CHECK_NOTHROW(dense_cholesky(r.K));
}

TEST_CASE("complex kernel: hermitian to the bit, real diagonal") {
  const auto r = gen_kernel_complex(KernelKind::Gaussian, 40, 11);
  for (std::size_t j = 0; j < 40; ++j) {
    CHECK(r.K(j, j).imag() == 0.0);
    for (std::size_t i = 0; i < 40; ++i) {
      CHECK(r.K(i, j).real() == r.K(j, i).real());
      CHECK(r.K(i, j).imag() == -r.K(j, i).imag());
    }
  }
  // diagonal: two unit self-similarities plus whatever shift was needed
  for (std::size_t j = 0; j < 40; ++j)
    CHECK(r.K(j, j).real() == doctest::Approx(2.0 + r.shift).epsilon(1e-15));
  CHECK_NOTHROW(dense_cholesky(r.K));

  const auto r2 = gen_kernel_complex(KernelKind::Gaussian, 40, 11);
  bool identical = true;
  for (std::size_t j = 0; j < 40; ++j)
    for (std::size_t i = 0; i < 40; ++i)
      identical = identical && r.K(i, j) == r2.K(i, j);
  CHECK(identical);
}
