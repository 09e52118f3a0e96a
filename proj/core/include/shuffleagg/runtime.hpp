#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "shuffleagg/protocol.hpp"
#include "shuffleagg/rng.hpp"

namespace shuffleagg {

// single: one shuffler for everything, rate_limit counted per user.
// per-coordinate: one shuffler per coordinate tag, rate_limit counted per
// (user, coordinate). rate_limit 0 means unlimited.
struct ShufflerTopology {
  enum class Mode { Single, PerCoordinate };
  Mode mode = Mode::Single;
  int rate_limit = 0;

  static ShufflerTopology single(int rate_limit = 0) {
    return ShufflerTopology{Mode::Single, rate_limit};
  }
  static ShufflerTopology per_coordinate(int rate_limit = 0) {
    return ShufflerTopology{Mode::PerCoordinate, rate_limit};
  }
};

// Messages dropped at shuffler ingress by rate limiting.
struct DropReport {
  std::uint64_t dropped_total = 0;
  std::map<int, std::uint64_t> dropped_per_user;

  std::string to_json() const;
};

struct RunResult {
  Vec output;
  DropReport drops;
};

// Uniform permutation of the concatenated per-user bundles. Provenance (user
// index per message) rides along for instrumented transcripts.
Transcript shuffle(const std::vector<std::vector<Payload>>& bundles, Rng& rng,
                   bool instrument = false);

// Rate-limit, shuffle and aggregate pre-built bundles; the poisoning
// experiments feed adversarial bundles through here.
RunResult execute_bundles(const std::vector<std::vector<Payload>>& bundles,
                          const ProtocolPair& protocol, const ShufflerTopology& topology,
                          Rng& rng, int aggregate_n);

// v_hat = A(Pi(R(v_1), ..., R(v_n))) under the given topology. Resets the
// protocol's shared randomness at the start of the run.
RunResult run_protocol(const std::vector<Vec>& inputs, const ProtocolPair& protocol,
                       const ShufflerTopology& topology, Rng& rng);

enum class InputFamily { SameBasis, SameRandom, IidUniform, Worst };

const char* input_family_name(InputFamily family);
InputFamily input_family_from_name(const std::string& name);

std::vector<Vec> sample_inputs(InputFamily family, int n, int d, Rng& rng);

struct ErrEstimate {
  double mse_mean = 0.0;
  double mse_ci95 = 0.0;
  int trials = 0;
  std::string input_family;

  std::string to_json() const;
};

// Monte-Carlo Err(A,R): mean and normal-approximation 95% CI of
// ||output - sum v_i||^2. Worst runs all three families and reports the max.
ErrEstimate estimate_err(const ProtocolPair& protocol, InputFamily family, int n, int d,
                         int trials, Rng& rng,
                         const ShufflerTopology& topology = ShufflerTopology::single());

}  // namespace shuffleagg
