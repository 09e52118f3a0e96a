#include "shuffleagg/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "shuffleagg/errors.hpp"

namespace shuffleagg {

Packing greedy_packing(int d, double rho, std::uint64_t seed, int max_size, int sample_budget) {
  if (rho <= 0.0 || rho >= 2.0) throw std::invalid_argument("greedy_packing: rho must be in (0,2)");
  if (d < 1) throw std::invalid_argument("greedy_packing: d must be >= 1");
  Packing p;
  p.rho = rho;
  p.d = d;
  p.seed = seed;
  Rng rng(splitmix64(seed ^ 0x7061636bULL));
  const double rho_sq = rho * rho;
  for (int s = 0; s < sample_budget && static_cast<int>(p.points.size()) < max_size; ++s) {
    Vec cand = UnitVector::random_sphere(d, rng).coords();
    bool ok = true;
    for (const Vec& q : p.points) {
      if ((cand - q).squaredNorm() < rho_sq) {
        ok = false;
        break;
      }
    }
    if (ok) p.points.push_back(std::move(cand));
  }
  return p;
}

int project_to_packing_index(const Packing& packing, const Vec& v) {
  if (packing.points.empty()) throw std::invalid_argument("project_to_packing: empty packing");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < packing.points.size(); ++i) {
    const double dist = (packing.points[i] - v).squaredNorm();
    if (dist < best_d) {
      best_d = dist;
      best = static_cast<int>(i);
    }
  }
  return best;
}

const Vec& project_to_packing(const Packing& packing, const Vec& v) {
  return packing.points[static_cast<std::size_t>(project_to_packing_index(packing, v))];
}

double enumeration_count(int n, int k, double budget) {
  if (k < 0 || n < 0 || k > n) throw std::invalid_argument("enumeration_count: bad arguments");
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (c > budget)
      throw BudgetError("enumeration budget exceeded: C(" + std::to_string(n) + "," +
                        std::to_string(k) + ") > " + std::to_string(budget));
  }
  return std::round(c);
}

namespace {

const Vec& vector_message(const Payload& p) {
  const Vec* m = std::get_if<Vec>(&p);
  if (!m) throw std::invalid_argument("attack: transcript does not carry vector messages");
  return *m;
}

// Lexicographic advance of a k-subset of [0, n).
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

CandidateSet attack_summation(const Transcript& transcript, int k, double budget) {
  const int total = static_cast<int>(transcript.messages.size());
  const double count = enumeration_count(total, k, budget);
  CandidateSet out;
  out.subset_size = k;
  out.vectors.reserve(static_cast<std::size_t>(count));
  if (total == 0 || k == 0) return out;
  const int d = static_cast<int>(vector_message(transcript.messages.front()).size());

  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  do {
    Vec sum = Vec::Zero(d);
    for (int i : idx) sum += vector_message(transcript.messages[static_cast<std::size_t>(i)]);
    out.vectors.push_back(std::move(sum));
  } while (next_combination(idx, total));
  return out;
}

CandidateSet attack_unbiased(const Transcript& transcript, int k, const ProtocolPair& protocol,
                             int mc_samples, Rng& rng, double budget) {
  if (mc_samples < 1) throw std::invalid_argument("attack_unbiased: mc_samples must be >= 1");
  if (!protocol.unbiased) throw std::invalid_argument("attack_unbiased: protocol is not unbiased");
  const int total = static_cast<int>(transcript.messages.size());
  enumeration_count(total, k, budget);
  const int n = transcript.n;
  CandidateSet out;
  out.subset_size = k;

  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  do {
    Vec acc = Vec::Zero(protocol.dim);
    for (int s = 0; s < mc_samples; ++s) {
      std::vector<std::vector<Payload>> bundles;
      bundles.reserve(static_cast<std::size_t>(n));
      std::vector<Payload> wt;
      wt.reserve(static_cast<std::size_t>(k));
      for (int i : idx) wt.push_back(transcript.messages[static_cast<std::size_t>(i)]);
      bundles.push_back(std::move(wt));
      for (int u = 1; u < n; ++u) {
        const Vec dummy = UnitVector::random_sphere(protocol.dim, rng).coords();
        bundles.push_back(protocol.randomize(dummy, rng));
      }
      Transcript t = shuffle(bundles, rng);
      acc += protocol.aggregate(t, n);
    }
    out.vectors.push_back(acc / static_cast<double>(mc_samples));
  } while (next_combination(idx, total));
  return out;
}

PoisonBundle poison_messages(const ProtocolPair& base, int d, double alpha, int probe_budget,
                             Rng& rng) {
  if (probe_budget < 1) throw std::invalid_argument("poison_messages: probe_budget must be >= 1");
  if (alpha <= 0.0) throw std::invalid_argument("poison_messages: alpha must be positive");
  const double threshold = 1.0 / (std::sqrt(static_cast<double>(d)) * alpha);
  Vec probe1 = Vec::Zero(base.dim);
  probe1(0) = 1.0;
  const Vec probe2 = -probe1;

  PoisonBundle bundle;
  Vec best;
  double best_norm = -1.0;
  for (int probe = 0; probe < probe_budget; ++probe) {
    const Vec& input = (probe % 2 == 0) ? probe1 : probe2;
    for (const Payload& p : base.randomize(input, rng)) {
      const Vec& m = vector_message(p);
      const double norm = m.norm();
      if (norm > best_norm) {
        best_norm = norm;
        best = m;
      }
    }
    if (best_norm >= threshold) break;
  }
  bundle.found_norm = best_norm;
  bundle.below_threshold = best_norm < threshold;
  bundle.messages.assign(static_cast<std::size_t>(d), Payload(best));
  return bundle;
}

std::string ReconstructionReport::to_json() const {
  nlohmann::json j{{"trials", trials},
                   {"success_rate", success_rate},
                   {"mean_min_dist", mean_min_dist},
                   {"budget_used", budget_used}};
  return j.dump();
}

ReconstructionReport reconstruction_experiment(const ProtocolPair& protocol,
                                               const Packing& packing, int n, int k, int trials,
                                               Rng& rng, int mc_samples) {
  if (packing.points.empty()) throw std::invalid_argument("reconstruction: empty packing");
  const double count = enumeration_count(n * k, k, 1e6);
  ReconstructionReport report;
  report.trials = trials;
  int successes = 0;
  double dist_sum = 0.0;

  for (int t = 0; t < trials; ++t) {
    const int target = static_cast<int>(rng.uniform_int(packing.points.size()));
    std::vector<Vec> inputs;
    inputs.reserve(static_cast<std::size_t>(n));
    inputs.push_back(packing.points[static_cast<std::size_t>(target)]);
    for (int u = 1; u < n; ++u) inputs.push_back(packing.points[0]);

    if (protocol.reset_shared) protocol.reset_shared(rng);
    std::vector<std::vector<Payload>> bundles;
    for (const Vec& v : inputs) bundles.push_back(protocol.randomize(v, rng));
    Transcript transcript = shuffle(bundles, rng);

    const CandidateSet s = (protocol.summation || mc_samples <= 0)
                               ? attack_summation(transcript, k)
                               : attack_unbiased(transcript, k, protocol, mc_samples, rng);
    dist_sum += min_sq_dist(inputs[0], s.vectors);
    bool hit = false;
    for (const Vec& u : s.vectors) {
      if (project_to_packing_index(packing, u) == target) {
        hit = true;
        break;
      }
    }
    if (hit) ++successes;
    report.budget_used += static_cast<std::uint64_t>(count);
  }
  report.success_rate = static_cast<double>(successes) / trials;
  report.mean_min_dist = dist_sum / trials;
  return report;
}

std::string PoisonAsymmetryReport::to_json() const {
  nlohmann::json j{{"trials", trials},
                   {"honest_mse_single", honest_mse_single},
                   {"honest_mse_per_coordinate", honest_mse_per_coordinate},
                   {"poisoned_mse_single", poisoned_mse_single},
                   {"poisoned_mse_per_coordinate", poisoned_mse_per_coordinate},
                   {"gap_single", gap_single},
                   {"gap_per_coordinate", gap_per_coordinate},
                   {"gap_ratio", gap_ratio}};
  return j.dump();
}

PoisonAsymmetryReport poisoning_asymmetry_experiment(const MultiMsgParams& params, int n,
                                                     int trials, int probe_budget, Rng& rng) {
  if (!params.robust)
    throw std::invalid_argument(
        "poisoning_asymmetry_experiment: needs the robust (bounded-influence) deployment");
  const ProtocolPair protocol = multi_message_protocol(params);
  const int d = params.dim();
  const ShufflerTopology single = ShufflerTopology::single();
  const ShufflerTopology per_coord = ShufflerTopology::per_coordinate(1);

  PoisonAsymmetryReport rep;
  rep.trials = trials;
  double h_single = 0.0, h_coord = 0.0, p_single = 0.0, p_coord = 0.0;

  for (int t = 0; t < trials; ++t) {
    std::vector<Vec> honest;
    honest.reserve(static_cast<std::size_t>(n - 1));
    for (int u = 0; u + 1 < n; ++u)
      honest.push_back(UnitVector::random_sphere(d, rng).coords());
    Vec ref = Vec::Zero(d);
    for (const Vec& v : honest) ref += v;

    std::vector<std::vector<Payload>> bundles;
    for (const Vec& v : honest) bundles.push_back(protocol.randomize(v, rng));

    // Replay attacker: probe honest runs, keep the message of largest decoded
    // magnitude, send d copies of it.
    TaggedMessage best{};
    double best_value = -1.0;
    Vec probe = Vec::Zero(d);
    probe(0) = 1.0;
    for (int pr = 0; pr < probe_budget; ++pr) {
      const Vec& input = (pr % 2 == 0) ? probe : static_cast<const Vec&>(-probe);
      for (const TaggedMessage& m : randomize_multi(UnitVector(input), params, rng)) {
        const double value = std::abs(tagged_message_value(m, params));
        if (value > best_value) {
          best_value = value;
          best = m;
        }
      }
    }
    std::vector<Payload> attacker(static_cast<std::size_t>(d), Payload(best));

    auto mse_of = [&](const ShufflerTopology& topo, bool poisoned) {
      std::vector<std::vector<Payload>> all = bundles;
      int agg_n = n - 1;
      if (poisoned) {
        all.push_back(attacker);
        agg_n = n;
      }
      const RunResult res = execute_bundles(all, protocol, topo, rng, agg_n);
      return (res.output - ref).squaredNorm();
    };

    h_single += mse_of(single, false);
    p_single += mse_of(single, true);
    h_coord += mse_of(per_coord, false);
    p_coord += mse_of(per_coord, true);
  }

  rep.honest_mse_single = h_single / trials;
  rep.poisoned_mse_single = p_single / trials;
  rep.honest_mse_per_coordinate = h_coord / trials;
  rep.poisoned_mse_per_coordinate = p_coord / trials;
  rep.gap_single = rep.poisoned_mse_single - rep.honest_mse_single;
  rep.gap_per_coordinate = rep.poisoned_mse_per_coordinate - rep.honest_mse_per_coordinate;
  rep.gap_ratio = rep.gap_single / std::max(rep.gap_per_coordinate, 1e-12);
  return rep;
}

}  // namespace shuffleagg
