#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace shuffleagg::cli {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct TopologyConfig {
  std::string mode = "single";  // single | per-coordinate
  int rate_limit = 0;
};

struct MultiConfig {
  double level = 4.0;
  std::uint64_t frame_seed = 1;
  bool robust = false;
};

struct CustomConfig {
  std::string base = "gaussian-shares";  // identity | gaussian-shares | single | multi
  std::vector<std::string> stack;        // rotate | coord | lift, applied left to right
  double sigma = 0.1;
  int shares = 2;
  int base_dim = 0;       // lift: dimension of the base protocol (>= 2d)
  double lift_level = 2.0;
};

struct SweepConfig {
  std::vector<double> n;
  std::vector<double> d;
  std::vector<double> eps;
  std::vector<double> delta;
};

struct AttackConfig {
  std::string kind = "reconstruction";  // reconstruction | poisoning
  int k = 2;
  double rho = 0.2;
  int packing_size = 32;
  int attack_trials = 200;
  int mc_samples = 0;  // 0: subset-sum attack; >0: unbiased attack
  int probe_budget = 64;
};

struct ExperimentConfig {
  std::string protocol = "single";  // single | multi | custom
  int n = 100;
  int d = 1;
  double eps = 1.0;
  double delta = 1e-5;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string input_family = "worst";
  TopologyConfig topology;
  MultiConfig multi;
  CustomConfig custom;
  SweepConfig sweep;
  AttackConfig attack;

  void validate() const;
  std::string serialize() const;
};

// Accepts the key = value table format or a JSON document (auto-detected).
// Unknown keys are rejected by name.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace shuffleagg::cli
