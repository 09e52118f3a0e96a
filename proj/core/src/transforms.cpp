#include "shuffleagg/transforms.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace shuffleagg {

namespace {

struct RotState {
  Rotation rotation;
};

struct CoordState {
  std::vector<int> perm;     // p[j] = pi(j)
  std::vector<int> inv;      // p[inv[i]] = i
  std::vector<int> signs;
};

std::vector<int> inverse_permutation(const std::vector<int>& p) {
  std::vector<int> inv(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) inv[static_cast<std::size_t>(p[j])] = static_cast<int>(j);
  return inv;
}

void fill_coord_state(CoordState& st, int d, Rng& rng) {
  st.perm.resize(d);
  st.signs.resize(d);
  for (int j = 0; j < d; ++j) st.perm[j] = j;
  for (int j = d - 1; j > 0; --j)
    std::swap(st.perm[j], st.perm[rng.uniform_int(static_cast<std::uint64_t>(j) + 1)]);
  for (int j = 0; j < d; ++j) st.signs[j] = rng.bernoulli(0.5) ? 1 : -1;
  st.inv = inverse_permutation(st.perm);
}

// T(v)_j = s[p[j]] * v[p[j]];  T^{-1}(x)_i = s[i] * x[inv[i]].
Vec coord_forward(const CoordState& st, const Vec& v) {
  Vec out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j)
    out(j) = st.signs[st.perm[j]] * v(st.perm[j]);
  return out;
}

Vec coord_inverse(const CoordState& st, const Vec& x) {
  Vec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out(i) = st.signs[i] * x(st.inv[i]);
  return out;
}

ProtocolPair rotate_with_state(const ProtocolPair& base, std::shared_ptr<RotState> state,
                               bool refresh) {
  ProtocolPair p = base;
  p.label = base.label + "+rotate";
  if (refresh) {
    auto prev = base.reset_shared;
    const int dim = base.dim;
    p.reset_shared = [state, prev, dim](Rng& rng) {
      if (prev) prev(rng);
      state->rotation = random_rotation(dim, rng.next_u64());
    };
  }
  if (base.vector_messages && base.summation) {
    // Per-message form: aggregator stays plain summation.
    p.randomize = [state, base](const Vec& v, Rng& rng) {
      std::vector<Payload> msgs = base.randomize(state->rotation.apply(v), rng);
      for (Payload& pl : msgs) {
        Vec* m = std::get_if<Vec>(&pl);
        if (!m) throw std::invalid_argument("rotate_symmetrize: non-vector message");
        *m = state->rotation.apply_inverse(*m);
      }
      return msgs;
    };
  } else {
    if (!base.aggregate)
      throw std::invalid_argument("rotate_symmetrize: base has neither vector messages nor an aggregator");
    p.randomize = [state, base](const Vec& v, Rng& rng) {
      return base.randomize(state->rotation.apply(v), rng);
    };
    p.aggregate = [state, base](const Transcript& t, int n) {
      return state->rotation.apply_inverse(base.aggregate(t, n));
    };
  }
  return p;
}

}  // namespace

ProtocolPair rotate_symmetrize(const ProtocolPair& base, std::uint64_t seed) {
  auto state = std::make_shared<RotState>();
  state->rotation = random_rotation(base.dim, seed);
  return rotate_with_state(base, std::move(state), /*refresh=*/true);
}

ProtocolPair rotate_symmetrize_fixed(const ProtocolPair& base, const Rotation& rotation) {
  if (rotation.d != base.dim)
    throw std::invalid_argument("rotate_symmetrize_fixed: rotation dimension mismatch");
  auto state = std::make_shared<RotState>();
  state->rotation = rotation;
  return rotate_with_state(base, std::move(state), /*refresh=*/false);
}

namespace {

ProtocolPair coord_with_state(const ProtocolPair& base, std::shared_ptr<CoordState> state,
                              bool refresh) {
  ProtocolPair p = base;
  p.label = base.label + "+coord";
  if (refresh) {
    auto prev = base.reset_shared;
    const int dim = base.dim;
    p.reset_shared = [state, prev, dim](Rng& rng) {
      if (prev) prev(rng);
      fill_coord_state(*state, dim, rng);
    };
  }
  p.randomize = [state, base](const Vec& v, Rng& rng) {
    std::vector<Payload> msgs = base.randomize(coord_forward(*state, v), rng);
    if (base.vector_messages && base.summation) {
      for (Payload& pl : msgs) {
        Vec* m = std::get_if<Vec>(&pl);
        if (!m) throw std::invalid_argument("coord_symmetrize: non-vector message");
        *m = coord_inverse(*state, *m);
      }
    }
    return msgs;
  };
  if (!(base.vector_messages && base.summation)) {
    if (!base.aggregate)
      throw std::invalid_argument("coord_symmetrize: base has neither vector messages nor an aggregator");
    p.aggregate = [state, base](const Transcript& t, int n) {
      return coord_inverse(*state, base.aggregate(t, n));
    };
  }
  return p;
}

}  // namespace

ProtocolPair coord_symmetrize(const ProtocolPair& base, std::uint64_t seed) {
  auto state = std::make_shared<CoordState>();
  Rng rng(seed);
  fill_coord_state(*state, base.dim, rng);
  return coord_with_state(base, std::move(state), /*refresh=*/true);
}

ProtocolPair coord_symmetrize_fixed(const ProtocolPair& base, std::vector<int> permutation,
                                    std::vector<int> signs) {
  if (static_cast<int>(permutation.size()) != base.dim ||
      static_cast<int>(signs.size()) != base.dim)
    throw std::invalid_argument("coord_symmetrize_fixed: wrong field lengths");
  for (int s : signs)
    if (s != 1 && s != -1) throw std::invalid_argument("coord_symmetrize_fixed: signs must be +-1");
  auto state = std::make_shared<CoordState>();
  state->perm = std::move(permutation);
  state->signs = std::move(signs);
  state->inv = inverse_permutation(state->perm);
  return coord_with_state(base, std::move(state), /*refresh=*/false);
}

Vec binary_round(const Vec& w, double bound, Rng& rng) {
  if (bound <= 0.0) throw std::invalid_argument("binary_round: bound must be positive");
  Vec out(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) > bound + 1e-12)
      throw std::invalid_argument("binary_round: sup-norm bound violated");
    const double p_plus = (w(i) + bound) / (2.0 * bound);
    out(i) = rng.bernoulli(p_plus) ? bound : -bound;
  }
  return out;
}

Vec binary_round(const Vec& w, Rng& rng) {
  if (w.size() % 2 != 0) throw std::invalid_argument("binary_round: expected a 2d'-length vector");
  const double d_prime = static_cast<double>(w.size()) / 2.0;
  return binary_round(w, 2.0 / std::sqrt(d_prime), rng);
}

ProtocolPair lift_dimension(const ProtocolPair& base, int d_prime, const KashinFrame& frame,
                            std::uint64_t seed) {
  if (d_prime < 1) throw std::invalid_argument("lift_dimension: d_prime must be >= 1");
  if (base.dim < 2 * d_prime)
    throw std::invalid_argument("lift_dimension: base dimension must be >= 2 * d_prime");
  if (frame.d != d_prime) throw std::invalid_argument("lift_dimension: frame dimension mismatch");

  const ProtocolPair sym = coord_symmetrize(base, splitmix64(seed ^ 0x6c696674ULL));
  const int big_d = base.dim;
  const double bound = frame.level / std::sqrt(static_cast<double>(d_prime));

  ProtocolPair p;
  p.dim = d_prime;
  p.messages_per_user = base.messages_per_user;
  p.label = base.label + "+lift";
  p.vector_messages = sym.vector_messages;
  p.summation = false;
  p.unbiased = base.unbiased;
  p.reset_shared = sym.reset_shared;
  p.randomize = [sym, frame, bound, big_d](const Vec& v, Rng& rng) {
    const Vec a = kashin_forward(frame, UnitVector(v));
    const Vec u = binary_round(a, bound, rng);
    Vec padded = Vec::Zero(big_d);
    padded.head(u.size()) = u;
    return sym.randomize(padded, rng);
  };
  p.aggregate = [sym, frame, d_prime](const Transcript& t, int n) {
    Vec full = sym.aggregate ? sym.aggregate(t, n) : sum_vector_messages(t, sym.dim);
    return kashin_inverse(frame, full.head(2 * d_prime).eval());
  };
  return p;
}

}  // namespace shuffleagg
