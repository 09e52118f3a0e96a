#include "shuffleagg/multi_message.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shuffleagg {

std::pair<double, double> split_budget(double eps, double delta, int d) {
  if (eps <= 0.0) throw std::invalid_argument("split_budget: eps must be positive");
  if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("split_budget: delta in (0,1)");
  if (d < 1) throw std::invalid_argument("split_budget: d must be >= 1");
  const double eps0 = eps / (2.0 * std::sqrt(2.0 * d * std::log(2.0 / delta)));
  const double delta0 = delta / (2.0 * d);
  return {eps0, delta0};
}

void MultiMsgParams::validate() const {
  if (frame.d < 1) throw std::invalid_argument("multi: missing frame");
  const auto [e0, d0] = split_budget(eps, delta, frame.d);
  if (std::abs(e0 - eps0) > 1e-12 * std::max(1.0, std::abs(e0)) ||
      std::abs(d0 - delta0) > 1e-12 * std::max(1.0, std::abs(d0)))
    throw std::invalid_argument("multi: (eps0, delta0) inconsistent with the budget split");
  if (std::abs(engine.eps0 - eps0) > 1e-12 || std::abs(engine.delta0 - delta0) > 1e-12)
    throw std::invalid_argument("multi: engine budgets differ from the split");
  engine.validate();
}

MultiMsgParams make_multi_params(double eps, double delta, int d, int n, std::uint64_t frame_seed,
                                 double level, bool robust) {
  MultiMsgParams p;
  p.eps = eps;
  p.delta = delta;
  std::tie(p.eps0, p.delta0) = split_budget(eps, delta, d);
  p.frame = make_frame(d, level, frame_seed);
  p.engine = default_engine_params(p.eps0, p.delta0, n);
  p.robust = robust;
  p.validate();
  return p;
}

std::array<std::uint8_t, 12> tagged_message_to_bytes(const TaggedMessage& m) {
  std::array<std::uint8_t, 12> out;
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(m.coord >> (8 * i));
  const auto res = scalar_message_to_bytes(m.payload);
  std::copy(res.begin(), res.end(), out.begin() + 4);
  return out;
}

TaggedMessage tagged_message_from_bytes(const std::uint8_t* bytes) {
  TaggedMessage m;
  m.coord = 0;
  for (int i = 0; i < 4; ++i) m.coord |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  m.payload = scalar_message_from_bytes(bytes + 4);
  return m;
}

namespace {

std::uint64_t mod_q(std::int64_t value, std::uint64_t q) {
  const auto sq = static_cast<std::int64_t>(q);
  std::int64_t r = value % sq;
  if (r < 0) r += sq;
  return static_cast<std::uint64_t>(r);
}

// Shifted engine inputs for all 2d coordinates.
Vec shifted_coefficients(const UnitVector& v, const MultiMsgParams& params) {
  const Vec a = kashin_forward(params.frame, v);
  const double scale = std::sqrt(static_cast<double>(params.frame.d)) / params.frame.level;
  Vec x(a.size());
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double u = scale * a(j);
    if (std::abs(u) > 1.0 + 1e-9)
      throw std::runtime_error("randomize_multi: Kashin level violated; frame bug");
    x(j) = std::clamp((u + 1.0) / 2.0, 0.0, 1.0);
  }
  return x;
}

}  // namespace

std::vector<TaggedMessage> randomize_multi(const UnitVector& v, const MultiMsgParams& params,
                                           Rng& rng) {
  if (v.dim() != params.frame.d)
    throw std::invalid_argument("randomize_multi: dimension mismatch");
  const Vec x = shifted_coefficients(v, params);
  const int coords = 2 * params.frame.d;
  std::vector<TaggedMessage> out;
  out.reserve(params.messages_per_user());
  for (int j = 0; j < coords; ++j) {
    if (params.robust) {
      const std::int64_t noise = sample_noise_share(params.engine, rng);
      const std::int64_t payload =
          static_cast<std::int64_t>(encode_fixed(x(j), params.engine.precision_bits)) +
          noise * (1LL << params.engine.precision_bits);
      out.push_back({static_cast<std::uint32_t>(j),
                     ScalarMessage{mod_q(payload, params.engine.modulus)}});
    } else {
      for (const ScalarMessage& m : randomize_scalar(x(j), params.engine, rng))
        out.push_back({static_cast<std::uint32_t>(j), m});
    }
  }
  return out;
}

Vec aggregate_multi(const std::vector<TaggedMessage>& messages, const MultiMsgParams& params,
                    int n, bool strict) {
  const int coords = 2 * params.frame.d;
  std::vector<std::vector<ScalarMessage>> groups(coords);
  for (const auto& m : messages) {
    if (m.coord >= static_cast<std::uint32_t>(coords))
      throw std::invalid_argument("aggregate_multi: coordinate tag out of range");
    groups[m.coord].push_back(m.payload);
  }
  const std::size_t expected =
      static_cast<std::size_t>(n) * (params.robust ? 1 : params.engine.shares_per_user);
  Vec u_hat(coords);
  const double inv_scale = std::ldexp(1.0, -params.engine.precision_bits);
  for (int j = 0; j < coords; ++j) {
    if (strict && groups[j].size() != expected)
      throw std::invalid_argument("aggregate_multi: coordinate group " + std::to_string(j) +
                                  " has " + std::to_string(groups[j].size()) + " messages, want " +
                                  std::to_string(expected));
    const double s = static_cast<double>(centered_residue_total(groups[j], params.engine, n)) *
                     inv_scale;
    u_hat(j) = 2.0 * s - static_cast<double>(n);
  }
  const double scale = params.frame.level / std::sqrt(static_cast<double>(params.frame.d));
  return scale * kashin_inverse(params.frame, u_hat);
}

double tagged_message_value(const TaggedMessage& m, const MultiMsgParams& params) {
  const std::uint64_t q = params.engine.modulus;
  if (m.payload.residue >= q) throw std::invalid_argument("tagged_message_value: residue out of ring");
  const std::int64_t sq = static_cast<std::int64_t>(q);
  const std::int64_t mid = 1LL << (params.engine.precision_bits - 1);
  const std::int64_t lo = mid - sq / 2;
  const std::int64_t t =
      lo + static_cast<std::int64_t>(mod_q(static_cast<std::int64_t>(m.payload.residue) - lo, q));
  return static_cast<double>(t) * std::ldexp(1.0, -params.engine.precision_bits);
}

}  // namespace shuffleagg
