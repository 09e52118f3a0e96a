#include "shuffleagg/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace shuffleagg {

std::string DropReport::to_json() const {
  nlohmann::json per_user = nlohmann::json::object();
  for (const auto& [user, count] : dropped_per_user) per_user[std::to_string(user)] = count;
  nlohmann::json j{{"dropped_total", dropped_total}, {"dropped_per_user", per_user}};
  return j.dump();
}

namespace {

std::uint32_t payload_coordinate(const Payload& p) {
  const TaggedMessage* m = std::get_if<TaggedMessage>(&p);
  if (!m)
    throw std::invalid_argument("per-coordinate topology needs coordinate-tagged messages");
  return m->coord;
}

void fisher_yates(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
}

}  // namespace

Transcript shuffle(const std::vector<std::vector<Payload>>& bundles, Rng& rng, bool instrument) {
  Transcript t;
  t.n = static_cast<int>(bundles.size());
  std::vector<int> owners;
  for (std::size_t u = 0; u < bundles.size(); ++u) {
    for (const Payload& p : bundles[u]) {
      t.messages.push_back(p);
      owners.push_back(static_cast<int>(u));
    }
  }
  std::vector<std::size_t> idx(t.messages.size());
  std::iota(idx.begin(), idx.end(), 0);
  fisher_yates(idx, rng);
  std::vector<Payload> shuffled;
  shuffled.reserve(t.messages.size());
  std::vector<int> prov;
  for (std::size_t i : idx) {
    shuffled.push_back(std::move(t.messages[i]));
    if (instrument) prov.push_back(owners[i]);
  }
  t.messages = std::move(shuffled);
  t.provenance = std::move(prov);
  return t;
}

RunResult execute_bundles(const std::vector<std::vector<Payload>>& bundles,
                          const ProtocolPair& protocol, const ShufflerTopology& topology,
                          Rng& rng, int aggregate_n) {
  DropReport drops;
  std::vector<std::vector<Payload>> kept(bundles.size());

  if (topology.mode == ShufflerTopology::Mode::Single) {
    for (std::size_t u = 0; u < bundles.size(); ++u) {
      int count = 0;
      for (const Payload& p : bundles[u]) {
        if (topology.rate_limit > 0 && count >= topology.rate_limit) {
          ++drops.dropped_total;
          ++drops.dropped_per_user[static_cast<int>(u)];
          continue;
        }
        kept[u].push_back(p);
        ++count;
      }
    }
    Transcript t = shuffle(kept, rng);
    return {protocol.aggregate(t, aggregate_n), std::move(drops)};
  }

  // Per-coordinate: rate-limit per (user, coordinate), shuffle each
  // coordinate group separately, then concatenate in group order.
  std::map<std::uint32_t, std::vector<Payload>> groups;
  for (std::size_t u = 0; u < bundles.size(); ++u) {
    std::map<std::uint32_t, int> counts;
    for (const Payload& p : bundles[u]) {
      const std::uint32_t coord = payload_coordinate(p);
      if (topology.rate_limit > 0 && counts[coord] >= topology.rate_limit) {
        ++drops.dropped_total;
        ++drops.dropped_per_user[static_cast<int>(u)];
        continue;
      }
      groups[coord].push_back(p);
      ++counts[coord];
    }
  }
  Transcript t;
  t.n = static_cast<int>(bundles.size());
  for (auto& [coord, msgs] : groups) {
    std::vector<std::size_t> idx(msgs.size());
    std::iota(idx.begin(), idx.end(), 0);
    fisher_yates(idx, rng);
    for (std::size_t i : idx) t.messages.push_back(std::move(msgs[i]));
  }
  return {protocol.aggregate(t, aggregate_n), std::move(drops)};
}

RunResult run_protocol(const std::vector<Vec>& inputs, const ProtocolPair& protocol,
                       const ShufflerTopology& topology, Rng& rng) {
  if (protocol.reset_shared) protocol.reset_shared(rng);
  std::vector<std::vector<Payload>> bundles;
  bundles.reserve(inputs.size());
  for (const Vec& v : inputs) {
    if (v.size() != protocol.dim) throw std::invalid_argument("run_protocol: input dimension mismatch");
    bundles.push_back(protocol.randomize(v, rng));
  }
  return execute_bundles(bundles, protocol, topology, rng, static_cast<int>(inputs.size()));
}

const char* input_family_name(InputFamily family) {
  switch (family) {
    case InputFamily::SameBasis: return "same-basis";
    case InputFamily::SameRandom: return "same-random";
    case InputFamily::IidUniform: return "iid-uniform";
    case InputFamily::Worst: return "worst";
  }
  return "unknown";
}

InputFamily input_family_from_name(const std::string& name) {
  if (name == "same-basis") return InputFamily::SameBasis;
  if (name == "same-random") return InputFamily::SameRandom;
  if (name == "iid-uniform") return InputFamily::IidUniform;
  if (name == "worst") return InputFamily::Worst;
  throw std::invalid_argument("unknown input family: " + name);
}

std::vector<Vec> sample_inputs(InputFamily family, int n, int d, Rng& rng) {
  std::vector<Vec> inputs;
  inputs.reserve(n);
  switch (family) {
    case InputFamily::SameBasis: {
      Vec e1 = Vec::Zero(d);
      e1(0) = 1.0;
      inputs.assign(n, e1);
      break;
    }
    case InputFamily::SameRandom: {
      const Vec v = UnitVector::random_sphere(d, rng).coords();
      inputs.assign(n, v);
      break;
    }
    case InputFamily::IidUniform: {
      for (int i = 0; i < n; ++i) inputs.push_back(UnitVector::random_sphere(d, rng).coords());
      break;
    }
    case InputFamily::Worst:
      throw std::invalid_argument("sample_inputs: worst is not a concrete family");
  }
  return inputs;
}

std::string ErrEstimate::to_json() const {
  nlohmann::json j{{"mse_mean", mse_mean},
                   {"mse_ci95", mse_ci95},
                   {"trials", trials},
                   {"input_family", input_family}};
  return j.dump();
}

ErrEstimate estimate_err(const ProtocolPair& protocol, InputFamily family, int n, int d,
                         int trials, Rng& rng, const ShufflerTopology& topology) {
  if (trials < 30) throw std::invalid_argument("estimate_err: trials must be >= 30");
  if (family == InputFamily::Worst) {
    ErrEstimate best;
    bool first = true;
    int salt = 1;
    for (InputFamily f :
         {InputFamily::SameBasis, InputFamily::SameRandom, InputFamily::IidUniform}) {
      Rng sub = rng.derive(static_cast<std::uint64_t>(salt++));
      ErrEstimate e = estimate_err(protocol, f, n, d, trials, sub, topology);
      if (first || e.mse_mean > best.mse_mean) {
        best = e;
        first = false;
      }
    }
    return best;
  }

  double sum = 0.0;
  double sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<Vec> inputs = sample_inputs(family, n, d, rng);
    Vec truth = Vec::Zero(d);
    for (const Vec& v : inputs) truth += v;
    const RunResult res = run_protocol(inputs, protocol, topology, rng);
    const double mse = (res.output - truth).squaredNorm();
    sum += mse;
    sum_sq += mse * mse;
  }
  ErrEstimate est;
  est.trials = trials;
  est.input_family = input_family_name(family);
  est.mse_mean = sum / trials;
  const double var = std::max(0.0, sum_sq / trials - est.mse_mean * est.mse_mean);
  est.mse_ci95 = 1.96 * std::sqrt(var / trials);
  return est;
}

}  // namespace shuffleagg
