#pragma once
#include <optional>

#include "mpcw/mpc_half.h"
#include "mpcw/mpc_third.h"

// Zero-knowledge proofs on shared secrets and envelope machinery: a prover
// with full knowledge of already-shared values convinces a verifier of a
// predicate without leaking anything beyond the (identically zero) check
// vector, plus committed-envelope realizations used by the notarization
// protocol.
namespace mpcw::zk {

// Proof that w = P(v_1..v_m) where the v_i and w are degree-t sharings the
// prover knows in the clear. The prover shares its claimed value for every
// gate of P; the network then checks every gate in parallel: one batched
// multiply layer covers all product gates regardless of depth, linear gates
// are local, and the per-gate differences u = claimed - computed are
// reconstructed toward the verifier (verifier = 0 reveals them publicly so
// all players act as verifiers at once). Accept iff every u is zero; an
// honest prover produces the identically zero vector.
//
// Circuit inputs bind positionally: the j-th layer-0 gate is claimed to
// equal v_handles[j], whose plaintext the prover passes in prover_v (read
// only by the prover). cheat_gate (prover-read, -1 = honest) makes the
// prover overstate one internal gate by 1.
struct ProveOutcome {
  bool accepted = false;       // meaningful for the verifier(s)
  std::vector<uint64_t> u;     // the revealed differences (verifier view)
};
ProveOutcome prove_secret_predicate(third::Party& P, int prover, int verifier,
                                    const third::Circuit& c,
                                    const std::vector<third::Secret>& v_handles,
                                    const third::Secret& w_handle,
                                    const std::vector<uint64_t>& prover_v,
                                    int cheat_gate = -1);

// Ideal in-process envelopes: commit returns an id, open returns the exact
// committed words, retain (consent = false) yields nothing and marks the
// envelope refused for good. Opening an id never committed throws.
class EnvelopeBox {
 public:
  int commit(std::vector<uint64_t> s);
  std::optional<std::vector<uint64_t>> open(int id, bool consent = true);
  bool opened(int id) const;

 private:
  struct Env {
    std::vector<uint64_t> data;
    bool opened = false;
    bool refused = false;
  };
  std::vector<Env> envs_;
};

// Network-backed envelopes: contents are vss_half handles, so reconstruction
// is robust against up to t tampered pieces but proceeds only on the
// dealer's say-so (the dealer broadcasts open/retain; retain yields nullopt
// for everyone).
std::vector<half::Handle> envelope_commit_net(half::Party& P, int dealer,
                                              const std::vector<uint64_t>& vals);
std::vector<std::optional<uint64_t>> envelope_open_net(half::Party& P,
                                                       const std::vector<half::Handle>& hs,
                                                       int dealer, bool consent);

// Two-party notarized envelope: sender S (player 1) convinces receiver R
// (player 2) that F(x) = y_claim, revealing nothing else until the optional
// stage-II opening of x. Per repetition the blinding randomness is jointly
// coin-flipped (r = r_hat xor s_hat, with r_hat committed before s_hat is
// announced), S commits the locally-random queries y_1..y_m of the degree-1
// reduction of F together with the claimed answers z_i, and R opens one
// random index, evaluating G = c_F itself on the opened pair. A sender whose
// z-vector interpolates to a false y_claim must be wrong at some index, so
// acceptance is at most (1 - 1/m)^K.
//
// cheat: S commits the true queries but patches the single z entry that
// steers the interpolation to y_claim, hoping R never opens it.
struct NotarizeOutcome {
  bool accept = false;                // R's verdict
  uint64_t y = 0;                     // the claimed value R would output
  std::vector<uint64_t> r_hat, s_hat; // per-repetition coin words
  std::vector<uint64_t> r;            // the joint coins actually used
  std::vector<uint64_t> x_opened;     // stage II: the committed input bits
};
NotarizeOutcome notarized_envelope(Ctx& ctx, const Field& f,
                                   const std::function<uint64_t(uint32_t)>& F, int nbits,
                                   uint32_t x, uint64_t y_claim, int K, bool cheat = false);

}  // namespace mpcw::zk
