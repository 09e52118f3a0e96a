#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "shuffleagg/rng.hpp"

namespace shuffleagg {

// One-dimensional shuffle-summation engine: fixed-point encoding, additive
// split-and-mix sharing over Z_q, and per-user Polya noise shares whose sum
// across n users is discrete Laplace with parameter t = exp(-eps0).
struct ScalarEngineParams {
  double eps0 = 1.0;
  double delta0 = 1e-6;
  int precision_bits = 24;
  std::uint64_t modulus = 0;
  int shares_per_user = 3;
  int n = 0;
  bool noise_enabled = true;

  void validate() const;

  // Standard deviation, in residue units, of one user's noise share.
  double noise_share_stddev() const;
};

// p = 24, g = 3, q = smallest power of two above 16 * n * 2^p.
ScalarEngineParams default_engine_params(double eps0, double delta0, int n);

struct ScalarMessage {
  std::uint64_t residue = 0;
};

// Wire form: 8-byte little-endian residue.
std::array<std::uint8_t, 8> scalar_message_to_bytes(const ScalarMessage& m);
ScalarMessage scalar_message_from_bytes(const std::uint8_t* bytes);

std::uint64_t encode_fixed(double x, int precision_bits);
double decode_fixed(std::uint64_t k, int precision_bits);

// X1 - X2 for independent Polya(1/n, exp(-eps0)) draws; zero mean. The n-user
// total is discrete Laplace with parameter t = exp(-eps0), variance
// 2t/(1-t)^2 in real units.
std::int64_t sample_noise_share(const ScalarEngineParams& params, Rng& rng);

// g residues, marginally uniform on [0, q), summing mod q to
// encode_fixed(x) + noise * 2^p.
std::vector<ScalarMessage> randomize_scalar(double x, const ScalarEngineParams& params, Rng& rng);

// Centered decode of the modular residue total, in input units. Expects
// exactly n * g messages.
double aggregate_scalar(const std::vector<ScalarMessage>& messages,
                        const ScalarEngineParams& params, int n);

// The modular total as a signed value. Used by both aggregate_scalar and the
// tag-grouped vector aggregation.
std::int64_t centered_residue_total(const std::vector<ScalarMessage>& messages,
                                    const ScalarEngineParams& params, int n);

}  // namespace shuffleagg
