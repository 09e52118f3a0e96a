#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "shuffleagg/multi_message.hpp"
#include "shuffleagg/rng.hpp"
#include "shuffleagg/single_message.hpp"
#include "shuffleagg/vecspace.hpp"

namespace shuffleagg {

using Payload = std::variant<Vec, TaggedMessage, BucketMessage>;

// Shuffled multiset of all users' messages. The order carries no user
// attribution; provenance is a test-only decoration for instrumented
// transcripts and is never read by attack logic.
struct Transcript {
  std::vector<Payload> messages;
  int n = 0;
  std::vector<int> provenance;  // empty unless instrumented; parallel to messages
};

// A randomizer/aggregator pair with run-level shared randomness. reset_shared
// (when set) is invoked once per protocol run, before any randomize call;
// combinators keep their public randomness behind shared_ptr state so a pair
// can be copied cheaply.
struct ProtocolPair {
  int dim = 0;
  int messages_per_user = 0;
  std::string label;
  bool vector_messages = false;
  bool summation = false;  // aggregate is plain summation of vector messages
  bool unbiased = false;
  std::function<void(Rng&)> reset_shared;
  std::function<std::vector<Payload>(const Vec&, Rng&)> randomize;
  std::function<Vec(const Transcript&, int)> aggregate;
};

// Sum of all vector payloads; the A+ aggregator.
Vec sum_vector_messages(const Transcript& transcript, int dim);

// Sends v itself as its one message; summation aggregator. Noiseless baseline.
ProtocolPair identity_protocol(int d);

// k additive shares of v, each share plus iid N(0, sigma^2 I). Summation
// aggregator, unbiased, per-user error k * sigma^2 * d.
ProtocolPair gaussian_shares_protocol(int d, int k, double sigma, std::uint64_t seed_salt = 0);

// Adapters exposing the concrete protocols through the generic interface.
ProtocolPair single_message_protocol(const SingleMsgParams& params);
ProtocolPair multi_message_protocol(const MultiMsgParams& params);

}  // namespace shuffleagg
