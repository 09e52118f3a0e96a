#pragma once

#include <cstdint>
#include <vector>

#include "shuffleagg/rng.hpp"
#include "shuffleagg/vecspace.hpp"

namespace shuffleagg {

// Parameters of the one-message bucket randomized-response protocol.
// gamma = c(r+1)/n is the blanket probability; k = (r+1)^d is the bucket
// count entering the amplification bound.
struct SingleMsgParams {
  int r = 1;
  double c = 0.0;
  double gamma = 0.0;
  int n = 0;
  int d = 0;
  double eps = 0.0;
  double delta = 0.0;
  double mse_bound = 0.0;  // nd((1-gamma)/4r^2 + gamma/2)/(1-gamma)^2, before the domain-shift factor 4

  void validate() const;
};

struct BucketMessage {
  std::vector<std::uint16_t> buckets;  // each in [0, r]
};

// Wire form: d unsigned 16-bit little-endian integers.
std::vector<std::uint8_t> bucket_message_to_bytes(const BucketMessage& m);
BucketMessage bucket_message_from_bytes(const std::uint8_t* bytes, int d);

// Minimum feasible blanket weight gamma for r, clamped to [0,1]; gamma = 1
// means the point is infeasible.
double single_msg_gamma(double eps, double delta, int n, int d, int r);

// Scans r in [1, min(1000, ceil(n^{1/d}))] for the integer minimizing the
// analytic MSE bound with gamma at its feasible minimum. Throws
// InfeasibleError when every r forces gamma >= 1.
SingleMsgParams select_params(double eps, double delta, int n, int d);

// Fixed-r variant of the solver (still validates feasibility).
SingleMsgParams params_for_r(double eps, double delta, int n, int d, int r);

// Coordinates are shifted x -> (x+1)/2 before rounding; with probability
// 1-gamma each coordinate is the unbiased rounding of r*x, otherwise the
// whole message is uniform on {0,...,r}^d.
BucketMessage randomize_single(const UnitVector& v, const SingleMsgParams& params, Rng& rng);

// Debias per coordinate and undo the domain shift; unbiased for the sum of
// the original inputs.
Vec aggregate_single(const std::vector<BucketMessage>& messages, const SingleMsgParams& params);

}  // namespace shuffleagg
