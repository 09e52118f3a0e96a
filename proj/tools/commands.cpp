#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "shuffleagg/accounting.hpp"
#include "shuffleagg/attacks.hpp"
#include "shuffleagg/errors.hpp"
#include "shuffleagg/single_message.hpp"
#include "shuffleagg/transforms.hpp"

namespace shuffleagg::cli {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string header_line(const std::string& command) {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
  return "# shuffle-agg " + command + " v1 generated_at=" + std::to_string(secs.count());
}

void write_report(const std::string& out_path, const std::string& command,
                  const std::string& body) {
  const std::string text = header_line(command) + "\n" + body + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + out_path);
  out << text;
}

}  // namespace

ShufflerTopology topology_from(const ExperimentConfig& cfg) {
  if (cfg.topology.mode == "per-coordinate")
    return ShufflerTopology::per_coordinate(cfg.topology.rate_limit);
  return ShufflerTopology::single(cfg.topology.rate_limit);
}

BuiltProtocol build_protocol(const ExperimentConfig& cfg, int n, int d, double eps, double delta) {
  auto base_of = [&](const std::string& name, int dim) -> ProtocolPair {
    if (name == "identity") return identity_protocol(dim);
    if (name == "gaussian-shares")
      return gaussian_shares_protocol(dim, cfg.custom.shares, cfg.custom.sigma);
    if (name == "single") return single_message_protocol(select_params(eps, delta, n, dim));
    if (name == "multi")
      return multi_message_protocol(
          make_multi_params(eps, delta, dim, n, cfg.multi.frame_seed, cfg.multi.level,
                            cfg.multi.robust));
    throw ConfigError("unknown protocol base: " + name);
  };

  ProtocolPair pair;
  if (cfg.protocol == "single") {
    pair = base_of("single", d);
  } else if (cfg.protocol == "multi") {
    pair = base_of("multi", d);
  } else {
    // custom combinator stack
    bool lifts = false;
    for (const std::string& s : cfg.custom.stack) lifts |= (s == "lift");
    const int base_dim = lifts ? (cfg.custom.base_dim > 0 ? cfg.custom.base_dim : 2 * d) : d;
    pair = base_of(cfg.custom.base, base_dim);
    std::uint64_t salt = cfg.seed ^ 0x737461636bULL;
    for (const std::string& s : cfg.custom.stack) {
      salt = splitmix64(salt);
      if (s == "rotate") {
        pair = rotate_symmetrize(pair, salt);
      } else if (s == "coord") {
        pair = coord_symmetrize(pair, salt);
      } else {
        const KashinFrame frame = make_frame(d, cfg.custom.lift_level, salt);
        pair = lift_dimension(pair, d, frame, salt);
      }
    }
  }
  return BuiltProtocol{pair, pair.messages_per_user};
}

int cmd_params(double eps, double delta, int n, int d, std::ostream& out) {
  out << "parameters for eps=" << fmt(eps) << " delta=" << fmt(delta) << " n=" << n << " d=" << d
      << "\n\n";

  out << "single-message (bucket randomized response)\n";
  try {
    const SingleMsgParams p = select_params(eps, delta, n, d);
    const double k = std::pow(static_cast<double>(p.r) + 1.0, d);
    out << "  feasible: yes\n";
    out << "  r       = " << p.r << "\n";
    out << "  c       = " << fmt(p.c) << "\n";
    out << "  gamma   = " << fmt(p.gamma) << "\n";
    out << "  k       = " << fmt(k) << "  ((r+1)^d buckets)\n";
    out << "  bound   = " << fmt(4.0 * p.mse_bound) << "  (analytic MSE bound, unit-ball domain)\n";
  } catch (const InfeasibleError& e) {
    out << "  feasible: no\n";
    out << "  reason  : " << e.what() << "\n";
    out << "  bound   : gamma = min(1, max(14k ln(2/delta)/((n-1)eps^2), 27k/((n-1)eps))) >= 1 "
           "for every r\n";
  }

  out << "\nmulti-message (Kashin + per-coordinate scalar engine)\n";
  try {
    const auto [eps0, delta0] = split_budget(eps, delta, d);
    const ScalarEngineParams engine = default_engine_params(eps0, delta0, n);
    out << "  feasible: yes\n";
    out << "  eps0    = " << fmt(eps0) << "\n";
    out << "  delta0  = " << fmt(delta0) << "\n";
    out << "  g       = " << engine.shares_per_user << "\n";
    out << "  p       = " << engine.precision_bits << "\n";
    out << "  q       = " << engine.modulus << "\n";
    out << "  k       = " << (2 * d * engine.shares_per_user) << "  (messages per user)\n";
  } catch (const std::exception& e) {
    out << "  feasible: no\n";
    out << "  reason  : " << e.what() << "\n";
  }
  return 0;
}

int cmd_run(const ExperimentConfig& cfg, const std::string& out_path, std::uint64_t seed) {
  const BuiltProtocol built = build_protocol(cfg, cfg.n, cfg.d, cfg.eps, cfg.delta);
  Rng rng = Rng(seed).derive(0);
  const ErrEstimate est = estimate_err(built.pair, input_family_from_name(cfg.input_family),
                                       cfg.n, cfg.d, cfg.trials, rng, topology_from(cfg));
  nlohmann::json j{{"protocol", built.pair.label},
                   {"n", cfg.n},
                   {"d", cfg.d},
                   {"eps", cfg.eps},
                   {"delta", cfg.delta},
                   {"seed", seed},
                   {"messages_per_user", built.messages_per_user},
                   {"err", nlohmann::json::parse(est.to_json())}};
  write_report(out_path, "run", j.dump(2));
  return 0;
}

namespace {

struct GridPoint {
  int n;
  int d;
  double eps;
  double delta;
};

struct SweepRow {
  GridPoint point;
  int trials = 0;
  double mse_mean = std::nan("");
  double mse_ci95 = std::nan("");
  int messages_per_user = 0;
  double seconds = 0.0;
  std::string label;
  std::string error;
};

}  // namespace

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_path, std::uint64_t seed,
              int threads) {
  auto axis = [](const std::vector<double>& list, double fallback) {
    return list.empty() ? std::vector<double>{fallback} : list;
  };
  const std::vector<double> ns = axis(cfg.sweep.n, cfg.n);
  const std::vector<double> ds = axis(cfg.sweep.d, cfg.d);
  const std::vector<double> epss = axis(cfg.sweep.eps, cfg.eps);
  const std::vector<double> deltas = axis(cfg.sweep.delta, cfg.delta);

  std::vector<GridPoint> grid;
  for (double n : ns)
    for (double d : ds)
      for (double eps : epss)
        for (double delta : deltas)
          grid.push_back({static_cast<int>(n), static_cast<int>(d), eps, delta});

  std::vector<SweepRow> rows(grid.size());
  const Rng master(seed);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      SweepRow& row = rows[i];
      row.point = grid[i];
      row.trials = cfg.trials;
      const auto start = std::chrono::steady_clock::now();
      try {
        const BuiltProtocol built =
            build_protocol(cfg, grid[i].n, grid[i].d, grid[i].eps, grid[i].delta);
        Rng rng = master.derive(i);
        const ErrEstimate est =
            estimate_err(built.pair, input_family_from_name(cfg.input_family), grid[i].n,
                         grid[i].d, cfg.trials, rng, topology_from(cfg));
        row.mse_mean = est.mse_mean;
        row.mse_ci95 = est.mse_ci95;
        row.messages_per_user = built.messages_per_user;
        row.label = built.pair.label;
      } catch (const std::exception& e) {
        row.error = e.what();
        row.label = cfg.protocol;
      }
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const int nthreads = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream body;
  body << "protocol,n,d,eps,delta,trials,mse_mean,mse_ci95,messages_per_user,seconds,error\n";
  for (const SweepRow& row : rows) {
    body << row.label << ',' << row.point.n << ',' << row.point.d << ',' << fmt(row.point.eps)
         << ',' << fmt(row.point.delta) << ',' << row.trials << ',' << fmt(row.mse_mean) << ','
         << fmt(row.mse_ci95) << ',' << row.messages_per_user << ',' << fmt(row.seconds) << ','
         << row.error << '\n';
  }
  write_report(out_path, "sweep", body.str().substr(0, body.str().size() - 1));
  return 0;
}

int cmd_attack(const ExperimentConfig& cfg, const std::string& out_path, std::uint64_t seed) {
  if (cfg.attack.kind == "poisoning") {
    const MultiMsgParams params = make_multi_params(cfg.eps, cfg.delta, cfg.d, cfg.n,
                                                    cfg.multi.frame_seed, cfg.multi.level,
                                                    /*robust=*/true);
    Rng rng = Rng(seed).derive(0x706f69736fULL);
    const PoisonAsymmetryReport rep = poisoning_asymmetry_experiment(
        params, cfg.n, cfg.attack.attack_trials, cfg.attack.probe_budget, rng);
    write_report(out_path, "attack", rep.to_json());
    return 0;
  }

  // reconstruction
  enumeration_count(cfg.n * cfg.attack.k, cfg.attack.k, 1e6);  // budget check before any work
  const BuiltProtocol built = build_protocol(cfg, cfg.n, cfg.d, cfg.eps, cfg.delta);
  Rng rng = Rng(seed).derive(0x7265636fULL);
  const Packing packing =
      greedy_packing(cfg.d, cfg.attack.rho, rng.next_u64(), cfg.attack.packing_size);
  const ReconstructionReport rep =
      reconstruction_experiment(built.pair, packing, cfg.n, cfg.attack.k,
                                cfg.attack.attack_trials, rng, cfg.attack.mc_samples);
  write_report(out_path, "attack", rep.to_json());
  return 0;
}

}  // namespace shuffleagg::cli
