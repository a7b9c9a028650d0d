#include "mpeig/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mpeig/dense_kernels.hpp"
#include "mpeig/errors.hpp"
#include "mpeig/rng.hpp"

namespace mpeig {

CsrMatrix<double> gen_laplace2d(std::size_t nx, std::size_t ny) {
  if (nx < 1 || ny < 1) throw ConfigError("gen_laplace2d: grid sides must be >= 1");
  const std::size_t n = nx * ny;
  std::vector<Triplet<double>> trip;
  trip.reserve(5 * n);
  // grid point (i, j) -> row i + nx*j; x-neighbours are +-1, y-neighbours +-nx
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const index_t p = static_cast<index_t>(i + nx * j);
      if (j > 0) trip.push_back({p, p - static_cast<index_t>(nx), -1.0});
      if (i > 0) trip.push_back({p, p - 1, -1.0});
      trip.push_back({p, p, 4.0});
      if (i + 1 < nx) trip.push_back({p, p + 1, -1.0});
      if (j + 1 < ny) trip.push_back({p, p + static_cast<index_t>(nx), -1.0});
    }
  }
  return CsrMatrix<double>::from_triplets(n, trip);
}

std::vector<double> laplace2d_eigenvalues(std::size_t nx, std::size_t ny) {
  std::vector<double> ev;
  ev.reserve(nx * ny);
  for (std::size_t i = 1; i <= nx; ++i) {
    const double si = std::sin(static_cast<double>(i) * std::numbers::pi /
                               (2.0 * (static_cast<double>(nx) + 1.0)));
    for (std::size_t j = 1; j <= ny; ++j) {
      const double sj = std::sin(static_cast<double>(j) * std::numbers::pi /
                                 (2.0 * (static_cast<double>(ny) + 1.0)));
      ev.push_back(4.0 * si * si + 4.0 * sj * sj);
    }
  }
  std::sort(ev.begin(), ev.end());
  return ev;
}

namespace {

// column i of `pts` is the point x_i in R^dim
DenseMatrix<double> draw_points(std::size_t dim, std::size_t count, Pcg64& rng) {
  DenseMatrix<double> pts(dim, count);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t d = 0; d < dim; ++d) pts(d, i) = rng.uniform01();
  return pts;
}

double kernel_eval(KernelKind kind, const DenseMatrix<double>& a, std::size_t ia,
                   const DenseMatrix<double>& b, std::size_t ib) {
  const std::size_t dim = a.rows();
  if (kind == KernelKind::Gaussian) {
    double d2 = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double t = a(d, ia) - b(d, ib);
      d2 += t * t;
    }
    return std::exp(-std::sqrt(d2) / 2.0);
  }
  double dot = 0.0;
  for (std::size_t d = 0; d < dim; ++d) dot += a(d, ia) * b(d, ib);
  const double s = dot + 1.0;
  return s * s * s;
}

// Kernel Gram matrices can be numerically semidefinite; bump the diagonal
// (geometrically, from a roundoff-sized start) until the working-precision
// factorization goes through, and report the bump.
template <class T>
double regularize_pd(DenseMatrix<T>& K) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < K.rows(); ++i)
    max_diag = std::max(max_diag, std::abs(real_s(K(i, i))));
  double shift = 0.0;
  double step = static_cast<double>(K.rows()) * kUnitRoundoffWorking *
                std::max(max_diag, 1.0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      DenseMatrix<T> trial = K;
      dense_cholesky(trial);
      return shift;
    } catch (const NotPositiveDefinite&) {
    } catch (const OverflowError&) {
    }
    const double add = shift == 0.0 ? step : 15.0 * shift;
    for (std::size_t i = 0; i < K.rows(); ++i) K(i, i) += add;
    shift += add;
  }
  throw NotPositiveDefinite(0, "gen_kernel: could not regularize to PD");
}

}  // namespace

KernelResult<double> gen_kernel(KernelKind kind, std::size_t n,
                                std::uint64_t seed) {
  if (n < 1) throw ConfigError("gen_kernel: n must be >= 1");
  Pcg64 rng(seed);
  const DenseMatrix<double> x = draw_points(n, n, rng);
  KernelResult<double> out{DenseMatrix<double>(n, n), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    out.K(i, i) = kernel_eval(kind, x, i, x, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = kernel_eval(kind, x, i, x, j);
      out.K(i, j) = v;
      out.K(j, i) = v;
    }
  }
  out.shift = regularize_pd(out.K);
  return out;
}

KernelResult<std::complex<double>> gen_kernel_complex(KernelKind kind,
                                                      std::size_t n,
                                                      std::uint64_t seed) {
  if (n < 1) throw ConfigError("gen_kernel: n must be >= 1");
  Pcg64 rng(seed);
  const DenseMatrix<double> x = draw_points(n, n, rng);
  const DenseMatrix<double> y = draw_points(n, n, rng);
  KernelResult<std::complex<double>> out{DenseMatrix<std::complex<double>>(n, n),
                                         0.0};
  for (std::size_t i = 0; i < n; ++i) {
    out.K(i, i) = {kernel_eval(kind, x, i, x, i) + kernel_eval(kind, y, i, y, i),
                   0.0};
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::complex<double> v{
          kernel_eval(kind, x, i, x, j) + kernel_eval(kind, y, i, y, j),
          kernel_eval(kind, x, i, y, j) - kernel_eval(kind, y, i, x, j)};
      out.K(i, j) = v;
      out.K(j, i) = std::conj(v);
    }
  }
  out.shift = regularize_pd(out.K);
  return out;
}

}  // namespace mpeig
