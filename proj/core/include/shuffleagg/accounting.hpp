#pragma once

namespace shuffleagg {

struct ComposedBudget {
  double eps_tilde = 0.0;
  double delta_tilde = 0.0;
};

// Advanced composition of k (eps, delta)-DP mechanisms:
// eps_tilde = eps sqrt(2k ln(1/delta')) + k eps (e^eps - 1)/(e^eps + 1),
// delta_tilde = k delta + delta'.
ComposedBudget advanced_composition(double eps, double delta, int k, double delta_prime);

// Minimum blanket weight from the amplification bound,
// min(1, max(14 k ln(2/delta) / ((n-1) eps^2), 27 k / ((n-1) eps))),
// clamped to [0, 1]. k_buckets may be fractional (computed in log space by
// callers with huge bucket counts).
double amplification_gamma_bound(double eps, double delta, int n, double k_buckets);

}  // namespace shuffleagg
