#include "shuffleagg/protocol.hpp"

#include <stdexcept>

namespace shuffleagg {

Vec sum_vector_messages(const Transcript& transcript, int dim) {
  Vec total = Vec::Zero(dim);
  for (const Payload& p : transcript.messages) {
    const Vec* m = std::get_if<Vec>(&p);
    if (!m) throw std::invalid_argument("summation aggregator: non-vector message");
    if (m->size() != dim) throw std::invalid_argument("summation aggregator: dimension mismatch");
    total += *m;
  }
  return total;
}

ProtocolPair identity_protocol(int d) {
  ProtocolPair p;
  p.dim = d;
  p.messages_per_user = 1;
  p.label = "identity";
  p.vector_messages = true;
  p.summation = true;
  p.unbiased = true;
  p.randomize = [](const Vec& v, Rng&) { return std::vector<Payload>{v}; };
  p.aggregate = [d](const Transcript& t, int) { return sum_vector_messages(t, d); };
  return p;
}

ProtocolPair gaussian_shares_protocol(int d, int k, double sigma, std::uint64_t) {
  if (k < 1) throw std::invalid_argument("gaussian_shares_protocol: k must be >= 1");
  ProtocolPair p;
  p.dim = d;
  p.messages_per_user = k;
  p.label = "gaussian-shares";
  p.vector_messages = true;
  p.summation = true;
  p.unbiased = true;
  p.randomize = [d, k, sigma](const Vec& v, Rng& rng) {
    std::vector<Payload> out;
    out.reserve(k);
    Vec remaining = v;
    for (int i = 0; i < k; ++i) {
      Vec share;
      if (i + 1 == k) {
        share = remaining;
      } else {
        share = Vec(d);
        for (int j = 0; j < d; ++j) share(j) = rng.normal();
        remaining -= share;
      }
      for (int j = 0; j < d; ++j) share(j) += sigma * rng.normal();
      out.emplace_back(std::move(share));
    }
    return out;
  };
  p.aggregate = [d](const Transcript& t, int) { return sum_vector_messages(t, d); };
  return p;
}

ProtocolPair single_message_protocol(const SingleMsgParams& params) {
  params.validate();
  ProtocolPair p;
  p.dim = params.d;
  p.messages_per_user = 1;
  p.label = "single-message";
  p.vector_messages = false;
  p.summation = false;
  p.unbiased = true;
  p.randomize = [params](const Vec& v, Rng& rng) {
    return std::vector<Payload>{randomize_single(UnitVector(v), params, rng)};
  };
  p.aggregate = [params](const Transcript& t, int n) {
    if (n != params.n)
      throw std::invalid_argument("single-message aggregate: n differs from params.n");
    std::vector<BucketMessage> msgs;
    msgs.reserve(t.messages.size());
    for (const Payload& pl : t.messages) {
      const BucketMessage* m = std::get_if<BucketMessage>(&pl);
      if (!m) throw std::invalid_argument("single-message aggregate: wrong payload type");
      msgs.push_back(*m);
    }
    return aggregate_single(msgs, params);
  };
  return p;
}

ProtocolPair multi_message_protocol(const MultiMsgParams& params) {
  params.validate();
  ProtocolPair p;
  p.dim = params.dim();
  p.messages_per_user = params.messages_per_user();
  p.label = params.robust ? "multi-message-robust" : "multi-message";
  p.vector_messages = false;
  p.summation = false;
  p.unbiased = true;
  p.randomize = [params](const Vec& v, Rng& rng) {
    std::vector<Payload> out;
    for (TaggedMessage& m : randomize_multi(UnitVector(v), params, rng))
      out.emplace_back(std::move(m));
    return out;
  };
  // Tolerant grouping: the summation analyzer adds whatever arrived. Count
  // contracts are enforced by the module-level aggregate_multi in strict mode.
  p.aggregate = [params](const Transcript& t, int n) {
    std::vector<TaggedMessage> msgs;
    msgs.reserve(t.messages.size());
    for (const Payload& pl : t.messages) {
      const TaggedMessage* m = std::get_if<TaggedMessage>(&pl);
      if (!m) throw std::invalid_argument("multi-message aggregate: wrong payload type");
      msgs.push_back(*m);
    }
    return aggregate_multi(msgs, params, n, /*strict=*/false);
  };
  return p;
}

}  // namespace shuffleagg
