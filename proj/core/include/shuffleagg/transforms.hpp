#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shuffleagg/protocol.hpp"
#include "shuffleagg/vecspace.hpp"

namespace shuffleagg {

// Protocol-run public randomness distributed to all parties before execution;
// excluded from the shuffled transcript. Only the fields a combinator needs
// are populated.
struct SharedRandomness {
  std::optional<Rotation> rotation;
  std::optional<std::vector<int>> permutation;  // pi, as p[j] = pi(j)
  std::optional<std::vector<int>> signs;        // entries in {-1, +1}
  std::uint64_t seed = 0;
};

// R_hat(v) = U^T R(Uv) with U drawn once per run. Summation-family protocols
// with vector messages get the per-message form (aggregator unchanged); any
// other protocol is conjugated at the input and output instead, which is the
// same map once the aggregator is applied.
ProtocolPair rotate_symmetrize(const ProtocolPair& base, std::uint64_t seed);

// Fixed public rotation, never refreshed. Test hook.
ProtocolPair rotate_symmetrize_fixed(const ProtocolPair& base, const Rotation& rotation);

// Coordinate shuffle plus sign flips under shared (pi, s). Summation-family
// vector protocols transform each message back; otherwise the aggregator
// output is untransformed. Equalizes the per-coordinate error marginals over
// sign-symmetric input domains.
ProtocolPair coord_symmetrize(const ProtocolPair& base, std::uint64_t seed);

ProtocolPair coord_symmetrize_fixed(const ProtocolPair& base, std::vector<int> permutation,
                                    std::vector<int> signs);

// Unbiased two-point rounding: each u_i = +-bound with mean w_i. Requires
// |w_i| <= bound.
Vec binary_round(const Vec& w, double bound, Rng& rng);

// bound = 2/sqrt(d') for a 2d'-length input, the level-2 frame convention.
Vec binary_round(const Vec& w, Rng& rng);

// Runs a d-dimensional base protocol (coordinate-symmetrized internally) on
// d'-dimensional inputs: frame coefficients, binary rounding, zero padding;
// the aggregate is truncated to the first 2d' coordinates and pulled back
// through the frame. Requires base.dim >= 2 * d_prime.
ProtocolPair lift_dimension(const ProtocolPair& base, int d_prime, const KashinFrame& frame,
                            std::uint64_t seed);

}  // namespace shuffleagg
