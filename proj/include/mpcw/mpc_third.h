#pragma once
#include <optional>
#include <set>

#include "mpcw/netsim.h"
#include "mpcw/sharing.h"

namespace mpcw::third {

// Honest-majority suite, n >= 3t+1. All protocol functions are SPMD: every
// player's thread calls the same function with the same public arguments;
// secret arguments are read only by the named role (dealer, prover, ...).
// Batched variants run their whole batch in the same constant number of
// rounds, which keeps multiply at a fixed round cost and circuit evaluation
// linear in depth.
struct Party {
  Ctx& ctx;
  const Field& f;
  int t;
  int n;
  std::set<int> disq;  // publicly agreed disqualified players

  Party(Ctx& c, const Field& fld, int t_) : ctx(c), f(fld), t(t_), n(c.n) {}
  uint64_t alpha(int i) const { return f.from_int(i); }
  bool alive(int i) const { return !disq.count(i); }
};

struct Secret {
  uint64_t piece = 0;
  bool ok = true;
};

// Plain (non-verified) degree-t Shamir sharing; 1 round.
std::vector<Secret> share_plain_many(Party& P, const std::vector<std::pair<int, uint64_t>>& deals);
Secret share_plain(Party& P, int dealer, uint64_t secret);
// Like share_plain but the dealer supplies the full coefficient vector
// (free term = secret); used by privacy replay tests with coupled randomness.
Secret share_with_poly(Party& P, int dealer, const std::vector<uint64_t>& coeffs);

// Verifiable secret sharing, phases V1..V8; 8 rounds for any batch size.
// A rejected deal yields piece 0, ok=false, and disqualifies the dealer.
std::vector<Secret> vss_deal_many(Party& P, const std::vector<std::pair<int, uint64_t>>& deals);
Secret vss_deal(Party& P, int dealer, uint64_t secret);

// Broadcast pieces, robust decode (corrects up to floor((n-t-1)/2) lies).
std::vector<uint64_t> reveal_many(Party& P, const std::vector<Secret>& ss);
uint64_t reveal(Party& P, const Secret& s);
// Private reconstruction toward a single player; others learn nothing and
// get nullopt.
std::optional<uint64_t> reveal_to(Party& P, const Secret& s, int who);
std::vector<std::optional<uint64_t>> reveal_to_many(Party& P, const std::vector<Secret>& ss,
                                                    int who);

// value = c0 + sum_k c_k * s_k; local, 0 rounds.
Secret linear_combine(Party& P, const std::vector<std::pair<uint64_t, Secret>>& terms, uint64_t c0);

// Degree reduction: every player holds one point h(alpha_i) of a degree-2t
// polynomial; afterwards everyone holds a degree-t sharing of h(0).
std::vector<Secret> truncate_many(Party& P, const std::vector<uint64_t>& h_pieces);
std::vector<Secret> multiply_many(Party& P, const std::vector<std::pair<Secret, Secret>>& pairs);
Secret multiply(Party& P, const Secret& a, const Secret& b);

// Alice verifiably shares a, b and c=a*b; everyone learns accept/reject.
// Sound: if Alice claims c != a*b at least t+1 players impeach her.
struct ProveProduct {
  Secret a, b, c;
  bool accepted = false;
};
ProveProduct prove_product(Party& P, int alice, uint64_t a, uint64_t b, uint64_t c_claim);

// Jointly random secrets: sum of fresh VSS deals from all alive players.
std::vector<Secret> rand_secret_many(Party& P, int count);
Secret rand_secret(Party& P);
// Random shared bits: contributions are VSS'd, validated by revealing
// b(b-1), failures excluded, survivors xor-combined.
Secret rand_bit(Party& P);

// ---- layered circuits ----
//
// Text grammar (one item per line, '#' comments):
//   gate L I input P                       (layer 0 only; P = player id)
//   gate L I linear c0 [ck L':I']...       (even layers > 0)
//   gate L I mul L':I' L'':I''             (odd layers)
//   out L I
// Gates may only reference earlier layers. Round-trips through print().
struct Gate {
  enum class Kind { Input, Linear, Mul };
  Kind kind = Kind::Input;
  int input_player = 0;
  std::vector<uint64_t> consts;              // c0, c1, ... for linear
  std::vector<std::pair<int, int>> ins;      // (layer, index)
};
struct Circuit {
  std::vector<std::vector<Gate>> layers;
  std::vector<std::pair<int, int>> outs;

  static Circuit parse(const std::string& text);
  std::string print() const;
  int depth() const { return int(layers.size()) - 1; }
  // Reference evaluation in the clear; inputs are consumed per player in
  // gate order (player -> list of values).
  std::vector<uint64_t> eval_plain(const Field& f,
                                   const std::map<int, std::vector<uint64_t>>& inputs) const;
};

// Secure evaluation; returns the revealed output values (same for
// everyone). Disqualified players' inputs default to 0.
std::vector<uint64_t> eval_circuit(Party& P, const Circuit& C, const std::vector<uint64_t>& my_inputs);

}  // namespace mpcw::third
