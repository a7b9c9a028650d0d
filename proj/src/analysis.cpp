#include "mpeig/analysis.hpp"

#include <cmath>
#include <string>

namespace mpeig::analysis {

double gamma_n(std::size_t n, double u) {
  if (!(u >= 0)) throw AssumptionViolated("gamma_n: negative unit roundoff");
  const double nu = static_cast<double>(n) * u;
  if (nu >= 1) throw AssumptionViolated("gamma_n: n*u >= 1");
  return nu / (1.0 - nu);
}

double epsilon_A(std::size_t n, double u_h) {
  return std::sqrt(static_cast<double>(n)) * gamma_n(n, u_h);
}

double epsilon_r(std::size_t n, double u_h, double eps_A) {
  const double nd = static_cast<double>(n);
  if (2.0 * nd * u_h >= 1) throw AssumptionViolated("epsilon_r: 2*n*u_h >= 1");
  const double g = gamma_n(n, u_h);
  const double num = (g + eps_A + g * eps_A + (nd + 1.0) * u_h) * (1.0 + u_h);
  return num / (1.0 - 2.0 * nd * u_h) + eps_A + u_h;
}

double epsilon_T(std::size_t n, double kappa, double u_l) {
  if (!(kappa >= 1)) throw AssumptionViolated("epsilon_T: kappa < 1");
  const double nd = static_cast<double>(n);
  const double v = 4.0 * nd * (3.0 * nd + 1.0) * kappa * u_l;
  if (v >= 1)
    throw BoundVacuous("epsilon_T: 4n(3n+1) kappa u_l = " + std::to_string(v) +
                       " >= 1");
  return v;
}

double gamma_precond_bound(std::size_t n, double kappa, double u_l) {
  const double e = epsilon_T(n, kappa, u_l);
  return e / (1.0 - e);
}

double beta(double rho, double lambda1, double lambda2, double lambdan) {
  if (!(0 < lambda1 && lambda1 < lambda2 && lambda2 <= lambdan))
    throw AssumptionViolated("beta: need 0 < lambda1 < lambda2 <= lambdan");
  if (!(lambda1 < rho && rho < lambda2))
    throw OutOfInterval("beta: rho outside (lambda1, lambda2)");
  const double b1 = std::sqrt(lambda1 * lambdan) / (rho - lambda1);
  const double b2 = std::sqrt(lambda2 * lambdan) / (lambda2 - rho);
  return b1 > b2 ? b1 : b2;
}

double gamma_total(double gamma_precond, double norm_te_norm_a, double beta_val,
                   std::size_t n, double u_h, double eps_r) {
  if (static_cast<double>(n) * u_h >= 1)
    throw AssumptionViolated("gamma_total: n*u_h >= 1");
  if (!(gamma_precond >= 0 && norm_te_norm_a >= 0 && beta_val >= 0 && eps_r >= 0))
    throw AssumptionViolated("gamma_total: negative input");
  const double g2 = gamma_n(2, u_h);
  return gamma_precond + g2 * norm_te_norm_a +
         beta_val * (u_h + (1.0 + g2) * eps_r * norm_te_norm_a);
}

double rate_bound(double gamma, double lambda1, double lambda2) {
  if (!(0 < lambda1 && lambda1 < lambda2))
    throw AssumptionViolated("rate_bound: need 0 < lambda1 < lambda2");
  if (!(gamma >= 0)) throw AssumptionViolated("rate_bound: gamma < 0");
  if (gamma >= 1) throw GammaTooLarge("rate_bound: gamma >= 1");
  const double base = gamma + (1.0 - gamma) * lambda1 / lambda2;
  return base * base;
}

double accuracy_floor(double gamma_precond, double norm_te_norm_a, std::size_t n,
                      double u_h, double eps_r, double lambda1, double lambdan) {
  if (!(0 < lambda1 && lambda1 <= lambdan))
    throw AssumptionViolated("accuracy_floor: need 0 < lambda1 <= lambdan");
  if (static_cast<double>(n) * u_h >= 1)
    throw AssumptionViolated("accuracy_floor: n*u_h >= 1");
  const double g2 = gamma_n(2, u_h);
  const double denom = 1.0 - gamma_precond - g2 * norm_te_norm_a;
  if (!(denom > 0))
    throw DenominatorNonpositive("accuracy_floor: 1 - gamma - g2||T||||A|| <= 0");
  const double num = u_h + (1.0 + g2) * eps_r * norm_te_norm_a;
  return std::sqrt(lambda1 * lambdan) * num / denom;
}

}  // namespace mpeig::analysis
