// mpeig-bench: generate or load a Hermitian PD matrix, run the requested
// eigensolver variant(s), and report convergence, timings, and (optionally)
// the rounding-error bound quantities.

#include <algorithm>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mpeig/analysis.hpp"
#include "mpeig/drivers.hpp"
#include "mpeig/generators.hpp"
#include "mpeig/matrix_market.hpp"
#include "mpeig/run_record.hpp"

namespace {

using namespace mpeig;

struct Problem {
  std::string name;
  std::optional<CsrMatrix<double>> sp_r;
  std::optional<CsrMatrix<std::complex<double>>> sp_c;
  std::optional<DenseMatrix<double>> dn_r;
  std::optional<DenseMatrix<std::complex<double>>> dn_c;
  double gen_shift = 0.0;
  std::size_t n = 0;
  std::int64_t nnz = 0;
};

Problem load_problem(const std::string& matrix_path, const std::string& gen_spec,
                     std::uint64_t seed) {
  Problem p;
  if (!matrix_path.empty()) {
    p.name = std::filesystem::path(matrix_path).filename().string();
    if (matrix_market_field(matrix_path) == Field::Real) {
      p.sp_r = read_matrix_market_real(matrix_path);
      p.n = p.sp_r->n();
      p.nnz = p.sp_r->nnz();
    } else {
      p.sp_c = read_matrix_market_complex(matrix_path);
      p.n = p.sp_c->n();
      p.nnz = p.sp_c->nnz();
    }
    return p;
  }
  p.name = gen_spec;
  const auto colon = gen_spec.find(':');
  if (colon == std::string::npos)
    throw ConfigError("--gen expects kind:size, got '" + gen_spec + "'");
  const std::string kind = gen_spec.substr(0, colon);
  const std::string size = gen_spec.substr(colon + 1);
  if (kind == "laplace2d") {
    const auto x = size.find('x');
    if (x == std::string::npos)
      throw ConfigError("--gen laplace2d expects NXxNY, got '" + size + "'");
    const long nx = std::stol(size.substr(0, x));
    const long ny = std::stol(size.substr(x + 1));
    if (nx < 1 || ny < 1) throw ConfigError("laplace2d sides must be >= 1");
    p.sp_r = gen_laplace2d(static_cast<std::size_t>(nx),
                           static_cast<std::size_t>(ny));
    p.n = p.sp_r->n();
    p.nnz = p.sp_r->nnz();
    return p;
  }
  const long n = std::stol(size);
  if (n < 1) throw ConfigError("--gen size must be >= 1");
  const auto nn = static_cast<std::size_t>(n);
  if (kind == "gaussian" || kind == "poly") {
    auto kr = gen_kernel(kind == "gaussian" ? KernelKind::Gaussian
                                            : KernelKind::Polynomial,
                         nn, seed);
    p.dn_r = std::move(kr.K);
    p.gen_shift = kr.shift;
    p.n = nn;
    p.nnz = static_cast<std::int64_t>(nn) * static_cast<std::int64_t>(nn);
  } else if (kind == "cgaussian" || kind == "cpoly") {
    auto kr = gen_kernel_complex(kind == "cgaussian" ? KernelKind::Gaussian
                                                     : KernelKind::Polynomial,
                                 nn, seed);
    p.dn_c = std::move(kr.K);
    p.gen_shift = kr.shift;
    p.n = nn;
    p.nnz = static_cast<std::int64_t>(nn) * static_cast<std::int64_t>(nn);
  } else {
    throw ConfigError("unknown generator '" + kind + "'");
  }
  return p;
}

template <class T>
CsrMatrix<T> dense_to_csr(const DenseMatrix<T>& A) {
  std::vector<Triplet<T>> trip;
  trip.reserve(A.rows() * A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j)
      if (A(i, j) != T{}) trip.push_back({static_cast<index_t>(i),
                                          static_cast<index_t>(j), A(i, j)});
  return CsrMatrix<T>::from_triplets(A.rows(), trip);
}

void dump_matrix(const Problem& p, const std::string& path) {
  if (p.sp_r) return write_matrix_market(path, *p.sp_r);
  if (p.sp_c) return write_matrix_market(path, *p.sp_c);
  if (p.dn_r) return write_matrix_market(path, dense_to_csr(*p.dn_r));
  write_matrix_market(path, dense_to_csr(*p.dn_c));
}

// Bound quantities for the run's preconditioner on a densified copy.
// Theorem-style beta/gamma/rate need a Rayleigh quotient location; we report
// them at the spectrum-anchored midpoint rho = (lambda1+lambda2)/2.
template <class MatT>
analysis::BoundReport bounds_for(const MatT& A, Variant variant) {
  using T = typename MatT::scalar_type;
  analysis::BoundReport b{};
  DenseMatrix<T> Ad;
  if constexpr (std::is_same_v<MatT, CsrMatrix<T>>) {
    Ad = A.densify();
  } else {
    Ad = A;
  }
  const std::size_t n = Ad.rows();
  b.n = n;
  const EigDecomposition<T> eig = small_herm_eig(Ad);
  const double l1 = static_cast<double>(eig.values.front());
  const double l2 = static_cast<double>(eig.values.size() > 1 ? eig.values[1]
                                                              : eig.values[0]);
  const double ln = static_cast<double>(eig.values.back());
  b.kappa = ln / l1;

  b.eps_A = analysis::epsilon_A(n, kUnitRoundoffWorking);
  b.eps_r = analysis::epsilon_r(n, kUnitRoundoffWorking, b.eps_A);
  b.eps_T = 4.0 * static_cast<double>(n) * (3.0 * static_cast<double>(n) + 1.0) *
            b.kappa * kUnitRoundoffLower;
  b.eps_T_vacuous = b.eps_T >= 1.0;

  const Preconditioner<T> P = Preconditioner<T>::build(
      Ad, variant == Variant::DLOBPCG_dchol ? Precision::Working
                                            : Precision::Lower);
  b.gamma_precond_meas = analysis::measure_gamma_precond(Ad, P);
  b.norm_te_norm_a =
      analysis::operator_norm_2(analysis::densify_preconditioner(P)) * analysis::operator_norm_2(Ad);

  const double rho = 0.5 * (l1 + l2);
  if (l1 < rho && rho < l2 && l2 <= ln) {
    b.beta_mid = analysis::beta(rho, l1, l2, ln);
    b.gamma_total_mid = analysis::gamma_total(b.gamma_precond_meas, b.norm_te_norm_a,
                                    b.beta_mid, n, kUnitRoundoffWorking, b.eps_r);
    b.rate_mid = b.gamma_total_mid < 1.0
                     ? analysis::rate_bound(b.gamma_total_mid, l1, l2)
                     : std::numeric_limits<double>::infinity();
  } else {  // degenerate leading eigenvalue: no interval to certify
    b.beta_mid = std::numeric_limits<double>::infinity();
    b.gamma_total_mid = std::numeric_limits<double>::infinity();
    b.rate_mid = std::numeric_limits<double>::infinity();
  }
  try {
    b.floor = analysis::accuracy_floor(b.gamma_precond_meas, b.norm_te_norm_a, n,
                             kUnitRoundoffWorking, b.eps_r, l1, ln);
  } catch (const DenominatorNonpositive&) {
    b.floor = std::numeric_limits<double>::infinity();
  }
  return b;
}

template <class MatT>
RunRecord run_on(const MatT& A, const Problem& p, Variant variant,
                 SolverConfig cfg, bool want_bounds, bool keep_history) {
  cfg.variant = variant;
  EigResult<typename MatT::scalar_type> r = solve(A, cfg);
  RunRecord rec;
  rec.matrix_name = p.name;
  rec.n = p.n;
  rec.nnz = p.nnz;
  rec.variant = variant_name(variant);
  rec.k = cfg.k;
  rec.m = cfg.block_size();
  rec.seed = cfg.seed;
  rec.iters_lower = r.iterations_lower;
  rec.iters_working = r.iterations_working;
  rec.converged = r.converged;
  rec.theta = r.theta;
  rec.resid = r.residual_norms;
  rec.timings = r.timings;
  if (keep_history) rec.history = std::move(r.history);
  if (want_bounds) rec.bounds = bounds_for(A, variant);
  return rec;
}

RunRecord run_variant_on(const Problem& p, Variant variant, const SolverConfig& cfg,
                         bool want_bounds, bool keep_history) {
  if (p.sp_r) return run_on(*p.sp_r, p, variant, cfg, want_bounds, keep_history);
  if (p.sp_c) return run_on(*p.sp_c, p, variant, cfg, want_bounds, keep_history);
  if (p.dn_r) return run_on(*p.dn_r, p, variant, cfg, want_bounds, keep_history);
  return run_on(*p.dn_c, p, variant, cfg, want_bounds, keep_history);
}

void print_summary(const std::vector<RunRecord>& records) {
  double t_ref = 0.0;
  for (const RunRecord& r : records)
    if (r.variant == variant_name(Variant::DLOBPCG_dchol)) t_ref = r.timings.total;
  std::printf("%-22s %7s %9s %-15s %3s %3s %6s %6s %5s %10s %10s %6s\n",
              "matrix", "n", "nnz", "variant", "k", "m", "it_lo", "it_hi",
              "conv", "t_factor", "t_total", "rel");
  for (const RunRecord& r : records) {
    const double rel = t_ref > 0.0 ? r.timings.total / t_ref : 0.0;
    std::printf("%-22s %7zu %9lld %-15s %3zu %3zu %6zu %6zu %5s %10.4f %10.4f %6.2f\n",
                r.matrix_name.c_str(), r.n, static_cast<long long>(r.nnz),
                r.variant.c_str(), r.k, r.m, r.iters_lower, r.iters_working,
                r.converged ? "yes" : "no", r.timings.factorize, r.timings.total,
                rel);
  }
  for (const RunRecord& r : records) {
    std::printf("\n%s eigenpairs:\n", r.variant.c_str());
    for (std::size_t j = 0; j < r.theta.size(); ++j)
      std::printf("  %3zu  theta = %-24s resid = %s\n", j + 1,
                  format_shortest(r.theta[j]).c_str(),
                  format_shortest(r.resid[j]).c_str());
    if (r.bounds) {
      const analysis::BoundReport& b = *r.bounds;
      std::printf(
          "  bounds: kappa=%s eps_A=%s eps_r=%s eps_T=%s%s gamma_precond=%s\n"
          "          |T||A|=%s beta_mid=%s gamma_mid=%s rate_mid=%s floor=%s\n",
          format_shortest(b.kappa).c_str(), format_shortest(b.eps_A).c_str(),
          format_shortest(b.eps_r).c_str(), format_shortest(b.eps_T).c_str(),
          b.eps_T_vacuous ? " (vacuous)" : "",
          format_shortest(b.gamma_precond_meas).c_str(),
          format_shortest(b.norm_te_norm_a).c_str(),
          format_shortest(b.beta_mid).c_str(),
          format_shortest(b.gamma_total_mid).c_str(),
          format_shortest(b.rate_mid).c_str(), format_shortest(b.floor).c_str());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed-precision block eigensolver benchmark"};
  std::string mode = "run", matrix_path, gen_spec, variant_str = "mplobpcg-schol";
  std::string csv_path, history_path, dump_path;
  SolverConfig cfg;
  bool want_bounds = false;
  int jobs = 1;

  app.add_option("mode", mode, "operation (only 'run')")
      ->check(CLI::IsMember({"run"}));
  auto* mx = app.add_option("--matrix", matrix_path,
                            "Matrix Market file (real symmetric or complex hermitian)");
  auto* gn = app.add_option(
      "--gen", gen_spec,
      "generator: laplace2d:NXxNY | gaussian:N | poly:N | cgaussian:N | cpoly:N");
  mx->excludes(gn);
  app.add_option("--k", cfg.k, "number of smallest eigenpairs")->capture_default_str();
  app.add_option("--block", cfg.block, "block size m (default ceil(1.5k))");
  app.add_option("--tol", cfg.tol, "working-precision tolerance")->capture_default_str();
  app.add_option("--lower-tol", cfg.lower_tol, "stage-1 tolerance")->capture_default_str();
  app.add_option("--maxit", cfg.maxit, "iteration cap per stage")->capture_default_str();
  app.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  app.add_option("--variant", variant_str,
                 "dlobpcg-dchol | dlobpcg-schol | mplobpcg-schol | pinvit | all")
      ->capture_default_str();
  app.add_option("--sketch-rows", cfg.sketch_rows, "rows in the norm sketch")
      ->capture_default_str();
  app.add_flag("--bounds", want_bounds, "emit rounding-error bound report (n <= 200)");
  app.add_option("--csv", csv_path, "write per-eigenpair CSV here");
  app.add_option("--history", history_path, "write JSON iteration history here");
  app.add_option("--jobs", jobs, "run independent variants concurrently");
  app.add_option("--dump-matrix", dump_path, "write the matrix in Matrix Market form");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (matrix_path.empty() == gen_spec.empty())
      throw ConfigError("exactly one of --matrix or --gen is required");
    const Problem p = load_problem(matrix_path, gen_spec, cfg.seed);
    if (p.gen_shift != 0.0)
      std::fprintf(stderr, "note: generator added diagonal shift %s\n",
                   format_shortest(p.gen_shift).c_str());
    if (!dump_path.empty()) dump_matrix(p, dump_path);
    if (want_bounds && p.n > 200)
      throw ConfigError("--bounds is limited to n <= 200");

    std::vector<Variant> variants;
    if (variant_str == "all") {
      variants = {Variant::DLOBPCG_dchol, Variant::DLOBPCG_schol,
                  Variant::MPLOBPCG_schol};
    } else {
      variants = {variant_from_name(variant_str)};
    }

    std::vector<RunRecord> records(variants.size());
    const bool keep_history = !history_path.empty();
    if (jobs > 1 && variants.size() > 1) {
      std::vector<std::thread> pool;
      for (std::size_t i = 0; i < variants.size(); ++i)
        pool.emplace_back([&, i] {
          records[i] = run_variant_on(p, variants[i], cfg, want_bounds, keep_history);
        });
      for (std::thread& t : pool) t.join();
    } else {
      for (std::size_t i = 0; i < variants.size(); ++i)
        records[i] = run_variant_on(p, variants[i], cfg, want_bounds, keep_history);
    }

    if (!csv_path.empty()) write_csv(csv_path, records);
    if (!history_path.empty()) write_history_json(history_path, records);
    print_summary(records);

    for (const RunRecord& r : records)
      if (!r.converged) {
        std::fprintf(stderr, "error: %s did not converge within maxit\n",
                     r.variant.c_str());
        return 2;
      }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
