#include "shuffleagg/scalar_engine.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace shuffleagg {

void ScalarEngineParams::validate() const {
  if (eps0 <= 0.0) throw std::invalid_argument("engine: eps0 must be positive");
  if (delta0 <= 0.0 || delta0 >= 1.0) throw std::invalid_argument("engine: delta0 must be in (0,1)");
  if (precision_bits < 1 || precision_bits > 40)
    throw std::invalid_argument("engine: precision_bits out of range");
  if (shares_per_user < 2) throw std::invalid_argument("engine: shares_per_user must be >= 2");
  if (n < 1) throw std::invalid_argument("engine: n must be >= 1");
  if (modulus == 0 || modulus > (1ULL << 62)) throw std::invalid_argument("engine: bad modulus");
  const double scale = std::ldexp(1.0, precision_bits);
  const double data_max = static_cast<double>(n) * scale;
  const double noise_margin = 6.0 * noise_share_stddev() * std::sqrt(static_cast<double>(n));
  if (static_cast<double>(modulus) <= data_max + noise_margin)
    throw std::invalid_argument("engine: modulus leaves no wraparound margin");
}

double ScalarEngineParams::noise_share_stddev() const {
  if (!noise_enabled) return 0.0;
  const double t = std::exp(-eps0);
  const double scale = std::ldexp(1.0, precision_bits);
  return scale * std::sqrt(2.0 * t / static_cast<double>(n)) / (1.0 - t);
}

ScalarEngineParams default_engine_params(double eps0, double delta0, int n) {
  if (n < 1) throw std::invalid_argument("default_engine_params: n must be >= 1");
  ScalarEngineParams p;
  p.eps0 = eps0;
  p.delta0 = delta0;
  p.precision_bits = 24;
  p.shares_per_user = 3;
  p.n = n;
  const double target = 16.0 * static_cast<double>(n) * std::ldexp(1.0, p.precision_bits);
  if (target > std::ldexp(1.0, 62)) throw std::invalid_argument("default_engine_params: n too large");
  std::uint64_t q = 1;
  while (static_cast<double>(q) <= target) q <<= 1;
  p.modulus = q;
  p.validate();
  return p;
}

std::array<std::uint8_t, 8> scalar_message_to_bytes(const ScalarMessage& m) {
  std::array<std::uint8_t, 8> out;
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(m.residue >> (8 * i));
  return out;
}

ScalarMessage scalar_message_from_bytes(const std::uint8_t* bytes) {
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return ScalarMessage{r};
}

std::uint64_t encode_fixed(double x, int precision_bits) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("encode_fixed: input outside [0,1]");
  return static_cast<std::uint64_t>(std::llround(x * std::ldexp(1.0, precision_bits)));
}

double decode_fixed(std::uint64_t k, int precision_bits) {
  return static_cast<double>(k) * std::ldexp(1.0, -precision_bits);
}

std::int64_t sample_noise_share(const ScalarEngineParams& params, Rng& rng) {
  if (!params.noise_enabled) return 0;
  const double t = std::exp(-params.eps0);
  const double shape = 1.0 / static_cast<double>(params.n);
  const auto x1 = static_cast<std::int64_t>(rng.polya(shape, t));
  const auto x2 = static_cast<std::int64_t>(rng.polya(shape, t));
  return x1 - x2;
}

namespace {

std::uint64_t mod_q(std::int64_t value, std::uint64_t q) {
  const auto sq = static_cast<std::int64_t>(q);
  std::int64_t r = value % sq;
  if (r < 0) r += sq;
  return static_cast<std::uint64_t>(r);
}

}  // namespace

std::vector<ScalarMessage> randomize_scalar(double x, const ScalarEngineParams& params, Rng& rng) {
  params.validate();
  const std::uint64_t q = params.modulus;
  const std::int64_t noise = sample_noise_share(params, rng);
  if (noise > (1LL << 32) || noise < -(1LL << 32))
    throw std::runtime_error("randomize_scalar: absurd noise magnitude");
  const std::int64_t payload =
      static_cast<std::int64_t>(encode_fixed(x, params.precision_bits)) +
      noise * (1LL << params.precision_bits);
  const std::uint64_t target = mod_q(payload, q);

  std::vector<ScalarMessage> shares(params.shares_per_user);
  std::uint64_t acc = 0;
  for (int i = 0; i + 1 < params.shares_per_user; ++i) {
    shares[i].residue = rng.uniform_int(q);
    acc = (acc + shares[i].residue) % q;
  }
  shares[params.shares_per_user - 1].residue = (target + q - acc) % q;
  return shares;
}

std::int64_t centered_residue_total(const std::vector<ScalarMessage>& messages,
                                    const ScalarEngineParams& params, int n) {
  const std::uint64_t q = params.modulus;
  std::uint64_t total = 0;
  for (const auto& m : messages) {
    if (m.residue >= q) throw std::invalid_argument("aggregate: residue out of ring");
    total = (total + m.residue) % q;
  }
  // Decode into the window of width q centered on the midpoint of the honest
  // data range [0, n * 2^p].
  const std::int64_t sq = static_cast<std::int64_t>(q);
  const std::int64_t mid = static_cast<std::int64_t>(n) << (params.precision_bits - 1);
  const std::int64_t lo = mid - sq / 2;
  std::int64_t t = lo + static_cast<std::int64_t>(mod_q(static_cast<std::int64_t>(total) - lo, q));
  // Totals landing within q/16 of a window edge signal a misconfigured ring.
  const std::int64_t guard = sq / 16;
  if (t < lo + guard || t >= lo + sq - guard)
    throw std::runtime_error("aggregate: residue total at window edge; modulus misconfigured");
  return t;
}

double aggregate_scalar(const std::vector<ScalarMessage>& messages,
                        const ScalarEngineParams& params, int n) {
  params.validate();
  if (static_cast<std::int64_t>(messages.size()) !=
      static_cast<std::int64_t>(n) * params.shares_per_user)
    throw std::invalid_argument("aggregate_scalar: expected n * g messages");
  const std::int64_t t = centered_residue_total(messages, params, n);
  return static_cast<double>(t) * std::ldexp(1.0, -params.precision_bits);
}

}  // namespace shuffleagg
