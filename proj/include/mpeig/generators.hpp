#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "mpeig/csr_matrix.hpp"
#include "mpeig/dense_matrix.hpp"

namespace mpeig {

// 5-point finite-difference Laplacian on an nx-by-ny grid with Dirichlet
// boundaries: diagonal 4, grid-neighbour couplings -1.
CsrMatrix<double> gen_laplace2d(std::size_t nx, std::size_t ny);

// Its full spectrum, ascending: 4sin^2(i*pi/(2(nx+1))) + 4sin^2(j*pi/(2(ny+1))).
std::vector<double> laplace2d_eigenvalues(std::size_t nx, std::size_t ny);

enum class KernelKind { Gaussian, Polynomial };

template <class T>
struct KernelResult {
  DenseMatrix<T> K;
  double shift = 0.0;  // diagonal regularization applied to make K factorizable
};

// Kernel Gram matrix on n seeded uniform random points in R^n.
// Gaussian: exp(-||x_i - x_j||_2 / 2); polynomial: (x_i . x_j + 1)^3.
KernelResult<double> gen_kernel(KernelKind kind, std::size_t n,
                                std::uint64_t seed);

// Hermitian complex form K_ij = k(x_i,x_j) + k(y_i,y_j) + i(k(x_i,y_j) -
// k(y_i,x_j)) over two point sets drawn from one stream (all x, then all y).
KernelResult<std::complex<double>> gen_kernel_complex(KernelKind kind,
                                                      std::size_t n,
                                                      std::uint64_t seed);

}  // namespace mpeig
