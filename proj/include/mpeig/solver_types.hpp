#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpeig/dense_matrix.hpp"
#include "mpeig/errors.hpp"

namespace mpeig {

enum class Variant { DLOBPCG_dchol, DLOBPCG_schol, MPLOBPCG_schol, PINVIT };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::DLOBPCG_dchol: return "dlobpcg-dchol";
    case Variant::DLOBPCG_schol: return "dlobpcg-schol";
    case Variant::MPLOBPCG_schol: return "mplobpcg-schol";
    case Variant::PINVIT: return "pinvit";
  }
  return "?";
}

inline Variant variant_from_name(const std::string& s) {
  for (Variant v : {Variant::DLOBPCG_dchol, Variant::DLOBPCG_schol,
                    Variant::MPLOBPCG_schol, Variant::PINVIT})
    if (s == variant_name(v)) return v;
  throw ConfigError("unknown variant '" + s + "'");
}

struct SolverConfig {
  std::size_t k = 1;
  std::size_t block = 0;  // 0 picks ceil(1.5 k)
  std::size_t maxit = 2000;
  double tol = 1e-12;
  double lower_tol = 5e-6;
  std::uint64_t seed = 0;
  Variant variant = Variant::MPLOBPCG_schol;
  std::size_t sketch_rows = 8;

  std::size_t block_size() const { return block != 0 ? block : (3 * k + 1) / 2; }

  void validate(std::size_t n) const {
    const std::size_t m = block_size();
    if (k < 1) throw ConfigError("config: k must be at least 1");
    if (m < k) throw ConfigError("config: block size below k");
    if (3 * m > n)
      throw ConfigError("config: block size " + std::to_string(m) +
                        " too large for n=" + std::to_string(n) +
                        " (need 3*block <= n)");
    if (!(tol > 0) || !(tol < 1)) throw ConfigError("config: tol outside (0,1)");
    if (!(lower_tol > 0) || !(lower_tol < 1))
      throw ConfigError("config: lower_tol outside (0,1)");
    if (maxit < 1) throw ConfigError("config: maxit must be at least 1");
    if (sketch_rows < 1) throw ConfigError("config: sketch_rows must be at least 1");
  }
};

struct IterationRecord {
  Precision stage = Precision::Working;
  std::vector<double> ritz_values;     // current block, ascending
  std::vector<double> residual_norms;  // per column
  std::size_t n_converged = 0;
  std::size_t w_columns_dropped = 0;
  bool basis_rotation_fallback = false;
};

struct StageTimings {
  double factorize = 0;
  double precond_apply = 0;
  double orthogonalize = 0;
  double projected_eig = 0;
  double total = 0;
};

template <class T>
struct EigResult {
  std::vector<double> theta;           // k smallest Ritz values, ascending
  DenseMatrix<T> X;                    // n x k, orthonormal columns
  std::vector<double> residual_norms;  // ||A x_j - theta_j x_j||_2
  std::size_t iterations_lower = 0;
  std::size_t iterations_working = 0;
  std::vector<IterationRecord> history;
  bool converged = false;
  StageTimings timings;
  double a_norm_estimate = 0;
  double precond_shift = 0;
};

}  // namespace mpeig
