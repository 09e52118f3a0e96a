#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "shuffleagg/errors.hpp"

int main(int argc, char** argv) {
  using namespace shuffleagg;
  using namespace shuffleagg::cli;

  CLI::App app{"shuffle-agg: private vector aggregation in the shuffle model"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed_override;
  int threads = 1;

  auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* opt = cmd->add_option("--config", config_path, "experiment config file");
    if (config_required) opt->required();
    cmd->add_option("--seed", seed_override, "override the config seed");
    cmd->add_option("--out", out_path, "output file (default: stdout)");
    cmd->add_option("--threads", threads, "worker threads for grid points")
        ->check(CLI::PositiveNumber);
  };

  double p_eps = 1.0, p_delta = 1e-5;
  int p_n = 1000, p_d = 1;
  CLI::App* params = app.add_subcommand("params", "solve and print protocol parameters");
  add_common(params, false);
  params->add_option("--eps", p_eps, "privacy epsilon");
  params->add_option("--delta", p_delta, "privacy delta");
  params->add_option("--n", p_n, "user count");
  params->add_option("--d", p_d, "dimension");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep, emit CSV");
  add_common(sweep, true);
  CLI::App* attack = app.add_subcommand("attack", "run a reconstruction or poisoning experiment");
  add_common(attack, true);
  CLI::App* run = app.add_subcommand("run", "run one experiment point, emit JSON");
  add_common(run, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    if (params->parsed()) {
      if (!config_path.empty()) {
        p_eps = cfg.eps;
        p_delta = cfg.delta;
        p_n = cfg.n;
        p_d = cfg.d;
      }
      return cmd_params(p_eps, p_delta, p_n, p_d, std::cout);
    }
    const std::uint64_t seed = seed_override.value_or(cfg.seed);
    if (sweep->parsed()) return cmd_sweep(cfg, out_path, seed, threads);
    if (attack->parsed()) return cmd_attack(cfg, out_path, seed);
    return cmd_run(cfg, out_path, seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
