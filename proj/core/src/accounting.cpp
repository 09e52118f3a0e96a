#include "shuffleagg/accounting.hpp"

#include <cmath>
#include <stdexcept>

namespace shuffleagg {

ComposedBudget advanced_composition(double eps, double delta, int k, double delta_prime) {
  if (eps < 0.0 || delta < 0.0) throw std::invalid_argument("advanced_composition: negative budget");
  if (delta_prime <= 0.0 || delta_prime >= 1.0)
    throw std::invalid_argument("advanced_composition: delta' must be in (0,1)");
  if (k < 0) throw std::invalid_argument("advanced_composition: k must be nonnegative");
  if (k == 0) return {0.0, delta_prime};
  const double kd = static_cast<double>(k);
  const double eps_tilde = eps * std::sqrt(2.0 * kd * std::log(1.0 / delta_prime)) +
                           kd * eps * (std::exp(eps) - 1.0) / (std::exp(eps) + 1.0);
  return {eps_tilde, kd * delta + delta_prime};
}

double amplification_gamma_bound(double eps, double delta, int n, double k_buckets) {
  if (n < 2) throw std::invalid_argument("amplification_gamma_bound: n must be >= 2");
  if (eps <= 0.0) throw std::invalid_argument("amplification_gamma_bound: eps must be positive");
  if (delta <= 0.0 || delta >= 1.0)
    throw std::invalid_argument("amplification_gamma_bound: delta must be in (0,1)");
  if (k_buckets <= 0.0) throw std::invalid_argument("amplification_gamma_bound: k must be positive");
  const double nm1 = static_cast<double>(n - 1);
  const double term1 = 14.0 * k_buckets * std::log(2.0 / delta) / (nm1 * eps * eps);
  const double term2 = 27.0 * k_buckets / (nm1 * eps);
  const double g = std::max(term1, term2);
  return std::min(1.0, std::max(0.0, g));
}

}  // namespace shuffleagg
