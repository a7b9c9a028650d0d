#pragma once

#include <cstdint>

#include "mpeig/dense_kernels.hpp"
#include "mpeig/dense_matrix.hpp"

namespace mpeig {

// Sketched spectral norm: ||Omega A||_F / ||Omega||_F for a seeded Gaussian
// Omega with sketch_rows rows.  Always lands in [sigma_min, sigma_max], is
// exact for scalar multiples of the identity, and costs one block apply.
// For Hermitian A, ||Omega A||_F = ||A Omega^*||_F, so the operator is
// applied to Omega^* directly.
template <class T>
double spectral_norm_estimate(const BlockOperator<T>& apply_A, std::size_t n,
                              std::size_t sketch_rows, std::uint64_t seed) {
  if (sketch_rows < 1) throw ConfigError("spectral_norm_estimate: sketch_rows < 1");
  const DenseMatrix<T> omega_t = gaussian_matrix<T>(n, sketch_rows, seed);
  const DenseMatrix<T> Y = apply_A(omega_t);
  const double denom = static_cast<double>(omega_t.frobenius_norm());
  if (denom == 0) return 0;
  return static_cast<double>(Y.frobenius_norm()) / denom;
}

}  // namespace mpeig
