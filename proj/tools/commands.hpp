#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "config.hpp"
#include "shuffleagg/protocol.hpp"
#include "shuffleagg/runtime.hpp"

namespace shuffleagg::cli {

struct BuiltProtocol {
  ProtocolPair pair;
  int messages_per_user = 0;
};

// Instantiates the configured protocol at one grid point. Throws
// InfeasibleError when the single-message solver rejects the point.
BuiltProtocol build_protocol(const ExperimentConfig& cfg, int n, int d, double eps, double delta);

ShufflerTopology topology_from(const ExperimentConfig& cfg);

// Parameter tables for both protocols at (eps, delta, n, d).
int cmd_params(double eps, double delta, int n, int d, std::ostream& out);

// One experiment point; JSON report after a one-line header.
int cmd_run(const ExperimentConfig& cfg, const std::string& out_path, std::uint64_t seed);

// Cross-product sweep; CSV after a one-line header. Deterministic per seed
// for any thread count.
int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_path, std::uint64_t seed,
              int threads);

// Reconstruction or poisoning experiment; JSON report after a header line.
int cmd_attack(const ExperimentConfig& cfg, const std::string& out_path, std::uint64_t seed);

}  // namespace shuffleagg::cli
