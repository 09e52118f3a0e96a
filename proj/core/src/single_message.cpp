#include "shuffleagg/single_message.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "shuffleagg/accounting.hpp"
#include "shuffleagg/errors.hpp"

namespace shuffleagg {

void SingleMsgParams::validate() const {
  if (r < 1 || r > 65535) throw std::invalid_argument("single: r out of [1, 65535]");
  if (n < 2) throw std::invalid_argument("single: n must be >= 2");
  if (d < 1) throw std::invalid_argument("single: d must be >= 1");
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("single: gamma must be in [0,1)");
  const double recomputed = c * (r + 1) / static_cast<double>(n);
  if (std::abs(recomputed - gamma) > 1e-9)
    throw std::invalid_argument("single: gamma != c(r+1)/n");
}

std::vector<std::uint8_t> bucket_message_to_bytes(const BucketMessage& m) {
  std::vector<std::uint8_t> out(2 * m.buckets.size());
  for (std::size_t j = 0; j < m.buckets.size(); ++j) {
    out[2 * j] = static_cast<std::uint8_t>(m.buckets[j] & 0xff);
    out[2 * j + 1] = static_cast<std::uint8_t>(m.buckets[j] >> 8);
  }
  return out;
}

BucketMessage bucket_message_from_bytes(const std::uint8_t* bytes, int d) {
  BucketMessage m;
  m.buckets.resize(d);
  for (int j = 0; j < d; ++j) {
    m.buckets[j] = static_cast<std::uint16_t>(bytes[2 * j]) |
                   (static_cast<std::uint16_t>(bytes[2 * j + 1]) << 8);
  }
  return m;
}

double single_msg_gamma(double eps, double delta, int n, int d, int r) {
  if (n < 2) throw std::invalid_argument("single_msg_gamma: n must be >= 2");
  // k = (r+1)^d in log space; beyond ~e^600 the bound is 1 regardless.
  const double log_k = d * std::log(static_cast<double>(r) + 1.0);
  if (log_k > 600.0) return 1.0;
  return amplification_gamma_bound(eps, delta, n, std::exp(log_k));
}

namespace {

double bound_at(double gamma, int n, int d, int r) {
  const double om = 1.0 - gamma;
  return static_cast<double>(n) * d * (om / (4.0 * static_cast<double>(r) * r) + gamma / 2.0) /
         (om * om);
}

SingleMsgParams finish_params(double eps, double delta, int n, int d, int r, double gamma) {
  SingleMsgParams p;
  p.r = r;
  p.gamma = gamma;
  p.c = gamma * static_cast<double>(n) / (r + 1);
  p.n = n;
  p.d = d;
  p.eps = eps;
  p.delta = delta;
  p.mse_bound = bound_at(gamma, n, d, r);
  p.validate();
  return p;
}

}  // namespace

SingleMsgParams params_for_r(double eps, double delta, int n, int d, int r) {
  if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("single: eps must be in (0,1]");
  if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("single: delta must be in (0,1)");
  const double gamma = single_msg_gamma(eps, delta, n, d, r);
  if (gamma >= 1.0)
    throw InfeasibleError("single-message: gamma >= 1 at r=" + std::to_string(r));
  return finish_params(eps, delta, n, d, r, gamma);
}

SingleMsgParams select_params(double eps, double delta, int n, int d) {
  if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("single: eps must be in (0,1]");
  if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("single: delta must be in (0,1)");
  if (n < 2) throw std::invalid_argument("single: n must be >= 2");
  if (d < 1) throw std::invalid_argument("single: d must be >= 1");

  const int r_cap = static_cast<int>(
      std::min(1000.0, std::ceil(std::pow(static_cast<double>(n), 1.0 / d))));
  int best_r = 0;
  double best_gamma = 1.0;
  double best_bound = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= std::max(1, r_cap); ++r) {
    if (r > 65535) break;
    const double gamma = single_msg_gamma(eps, delta, n, d, r);
    if (gamma >= 1.0) continue;
    const double bound = bound_at(gamma, n, d, r);
    if (bound < best_bound) {  // ties break toward smaller r
      best_bound = bound;
      best_r = r;
      best_gamma = gamma;
    }
  }
  if (best_r == 0)
    throw InfeasibleError("single-message: no feasible r (gamma >= 1 everywhere) at n=" +
                          std::to_string(n) + " d=" + std::to_string(d));
  return finish_params(eps, delta, n, d, best_r, best_gamma);
}

BucketMessage randomize_single(const UnitVector& v, const SingleMsgParams& params, Rng& rng) {
  params.validate();
  if (v.dim() != params.d) throw std::invalid_argument("randomize_single: dimension mismatch");
  const int r = params.r;
  BucketMessage msg;
  msg.buckets.resize(params.d);
  if (rng.bernoulli(params.gamma)) {
    for (int j = 0; j < params.d; ++j)
      msg.buckets[j] = static_cast<std::uint16_t>(rng.uniform_int(r + 1));
    return msg;
  }
  for (int j = 0; j < params.d; ++j) {
    const double x = (v.coords()(j) + 1.0) / 2.0;
    const double y = r * x;
    double base = std::floor(y);
    const double frac = y - base;
    // Exact lattice points take the Ber(0) branch with no sampling.
    if (frac > 0.0 && rng.bernoulli(frac)) base += 1.0;
    if (base < 0.0) base = 0.0;
    if (base > r) base = r;
    msg.buckets[j] = static_cast<std::uint16_t>(base);
  }
  return msg;
}

Vec aggregate_single(const std::vector<BucketMessage>& messages, const SingleMsgParams& params) {
  params.validate();
  if (static_cast<int>(messages.size()) != params.n)
    throw std::invalid_argument("aggregate_single: message count != n");
  const int d = params.d;
  Vec z = Vec::Zero(d);
  for (const auto& m : messages) {
    if (static_cast<int>(m.buckets.size()) != d)
      throw std::invalid_argument("aggregate_single: message dimension mismatch");
    for (int j = 0; j < d; ++j) {
      if (m.buckets[j] > params.r)
        throw std::invalid_argument("aggregate_single: bucket out of range");
      z(j) += m.buckets[j];
    }
  }
  z /= static_cast<double>(params.r);
  Vec out(d);
  const double shift = params.c * (params.r + 1) / 2.0;  // = gamma * n / 2
  for (int j = 0; j < d; ++j) {
    const double vtilde = (z(j) - shift) / (1.0 - params.gamma);
    out(j) = 2.0 * vtilde - static_cast<double>(params.n);
  }
  return out;
}

}  // namespace shuffleagg
