#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "shuffleagg/rng.hpp"
#include "shuffleagg/scalar_engine.hpp"
#include "shuffleagg/vecspace.hpp"

namespace shuffleagg {

// Per-coordinate budget split for composing 2d scalar mechanisms:
// eps0 = eps / (2 sqrt(2 d ln(2/delta))), delta0 = delta / (2d).
std::pair<double, double> split_budget(double eps, double delta, int d);

struct MultiMsgParams {
  double eps = 0.0;
  double delta = 0.0;
  double eps0 = 0.0;
  double delta0 = 0.0;
  KashinFrame frame;
  ScalarEngineParams engine;
  // Robust deployment: one bounded-value message per coordinate instead of g
  // uniform shares. Required for per-coordinate rate limiting to mean
  // anything; a uniform ring share carries unbounded influence.
  bool robust = false;

  int dim() const { return frame.d; }
  int messages_per_user() const {
    return 2 * frame.d * (robust ? 1 : engine.shares_per_user);
  }
  void validate() const;
};

MultiMsgParams make_multi_params(double eps, double delta, int d, int n,
                                 std::uint64_t frame_seed = 1, double level = 4.0,
                                 bool robust = false);

// Coordinate tag in [0, 2d) plus an engine residue; the sparse encoding of a
// basis-scaled vector message.
struct TaggedMessage {
  std::uint32_t coord = 0;
  ScalarMessage payload;
};

// Wire form: 4-byte little-endian tag, then the 8-byte residue.
std::array<std::uint8_t, 12> tagged_message_to_bytes(const TaggedMessage& m);
TaggedMessage tagged_message_from_bytes(const std::uint8_t* bytes);

// Kashin transform, map each coefficient to [0,1], run the scalar engine per
// coordinate. Emits exactly 2d * g messages (2d when robust).
std::vector<TaggedMessage> randomize_multi(const UnitVector& v, const MultiMsgParams& params,
                                           Rng& rng);

// Per-coordinate modular aggregation, un-shift, then the scaled inverse
// transform. strict requires every coordinate group to hold exactly n*g
// messages (n when robust); the tolerant mode sums whatever arrived, which is
// what the summation analyzer of the robustness model does.
Vec aggregate_multi(const std::vector<TaggedMessage>& messages, const MultiMsgParams& params,
                    int n, bool strict = true);

// Signed real value a tagged message contributes to its coordinate of the
// pre-transform aggregate. Bounded for robust-mode messages, uniform over the
// ring otherwise.
double tagged_message_value(const TaggedMessage& m, const MultiMsgParams& params);

}  // namespace shuffleagg
