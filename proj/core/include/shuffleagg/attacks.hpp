#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shuffleagg/multi_message.hpp"
#include "shuffleagg/protocol.hpp"
#include "shuffleagg/runtime.hpp"
#include "shuffleagg/vecspace.hpp"

namespace shuffleagg {

// Unit vectors with pairwise Euclidean distance >= rho.
struct Packing {
  std::vector<Vec> points;
  double rho = 0.0;
  int d = 0;
  std::uint64_t seed = 0;
};

// Greedy rejection sampling on the sphere: keep a uniform draw when it is at
// least rho from everything kept so far. Deterministic per seed; returns what
// it found within the sample budget.
Packing greedy_packing(int d, double rho, std::uint64_t seed, int max_size,
                       int sample_budget = 50000);

// Nearest packing point, ties to the lowest index.
int project_to_packing_index(const Packing& packing, const Vec& v);
const Vec& project_to_packing(const Packing& packing, const Vec& v);

struct CandidateSet {
  std::vector<Vec> vectors;
  int subset_size = 0;
};

// C(n, k) as a double, throwing BudgetError above the enumeration budget.
double enumeration_count(int n, int k, double budget = 1e6);

// All sums of size-k message subsets of a vector-message transcript.
CandidateSet attack_summation(const Transcript& transcript, int k, double budget = 1e6);

// For each size-k subset, the Monte-Carlo average over dummy-input draws of
// the aggregator applied to the subset plus n-1 randomized dummies. Uses the
// protocol's current shared randomness (public, so known to the attacker).
CandidateSet attack_unbiased(const Transcript& transcript, int k, const ProtocolPair& protocol,
                             int mc_samples, Rng& rng, double budget = 1e6);

struct PoisonBundle {
  std::vector<Payload> messages;
  double found_norm = 0.0;
  bool below_threshold = false;
};

// Probes the randomizer looking for a message of norm >= 1/(sqrt(d) alpha)
// and replicates the best find d times.
PoisonBundle poison_messages(const ProtocolPair& base, int d, double alpha, int probe_budget,
                             Rng& rng);

struct ReconstructionReport {
  int trials = 0;
  double success_rate = 0.0;
  double mean_min_dist = 0.0;
  std::uint64_t budget_used = 0;

  std::string to_json() const;
};

// Datasets X_i = (v_i, v_1, ..., v_1) over sampled packing points: run,
// attack, project to the packing, count recoveries of v_i.
ReconstructionReport reconstruction_experiment(const ProtocolPair& protocol,
                                               const Packing& packing, int n, int k, int trials,
                                               Rng& rng, int mc_samples = 0);

struct PoisonAsymmetryReport {
  int trials = 0;
  double honest_mse_single = 0.0;
  double honest_mse_per_coordinate = 0.0;
  double poisoned_mse_single = 0.0;
  double poisoned_mse_per_coordinate = 0.0;
  double gap_single = 0.0;
  double gap_per_coordinate = 0.0;
  double gap_ratio = 0.0;

  std::string to_json() const;
};

// One replay attacker against the robust multi-message protocol, single
// shuffler versus per-coordinate shufflers with rate limit B=1. The gap is
// poisoned-minus-honest MSE against the honest users' sum.
PoisonAsymmetryReport poisoning_asymmetry_experiment(const MultiMsgParams& params, int n,
                                                     int trials, int probe_budget, Rng& rng);

}  // namespace shuffleagg
