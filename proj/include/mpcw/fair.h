#pragma once
#include <array>
#include <optional>

#include "mpcw/mpc_third.h"
#include "mpcw/netsim.h"

// Faulty-majority suite: sum-sharing arithmetic over an ideal two-party
// evaluation channel (fail-stop semantics: a halt makes every honest player
// output Cheating), gradual fair disclosure with biased coins and odds
// accounting, and garbled gates over the ideal 1-out-of-2 transfer channel.
namespace mpcw::fair {

struct Party {
  Ctx& ctx;
  const Field& f;
  int n;
  Party(Ctx& c, const Field& fld) : ctx(c), f(fld), n(c.n) {}
};

// Ideal two-party evaluation functions; register these in
// SimOptions::tpe_registry under the matching ids before running.
constexpr uint64_t kTpeMult = 0xfa17a1;
constexpr uint64_t kTpeCoins = 0xfa17c0;
// Batched directed products: each side posts count and per-item
// (a, b, r, s); per item and direction the poster of the first operand
// learns alpha = a*b' + r + s' and the other side beta = -(r + s'), so
// alpha + beta = a*b' while each word alone is uniform.
TpeFunc make_mult_tpe(const Field& f);
// Biased coins masked with F in one stroke: sides post (f_share, seed, k,
// count); the coins c_j are 0 with probability 1/2 + 1/k and the sides
// receive fresh xor-shares of d_j = F xor c_j.
TpeFunc make_coin_tpe();

// Sum sharing: dealer splits value into n uniform summands, one round.
// nullopt = the dealer halted (Cheating).
std::optional<uint64_t> share_su(Party& P, int dealer, uint64_t value);
// Reconstruct by broadcasting pieces; nullopt if anyone withheld theirs.
std::optional<uint64_t> reveal_su(Party& P, uint64_t piece);
// Sum-share multiplication: local cross terms via the ideal channel, two
// rounds for any batch. nullopt = some participant halted.
std::optional<std::vector<uint64_t>> mult_su_many(
    Party& P, const std::vector<std::pair<uint64_t, uint64_t>>& pairs);
std::optional<uint64_t> mult_su(Party& P, uint64_t a_piece, uint64_t b_piece);

// Layered-circuit evaluation on sum shares; any detected halt yields
// nullopt (Cheating) for every honest player within one round.
std::optional<std::vector<uint64_t>> eval_semi(Party& P, const third::Circuit& c,
                                               const std::vector<uint64_t>& my_inputs);

// ---- gradual disclosure ----

// Bayesian posterior bookkeeping for the biased-coin disclosure: observing
// d with P[d = F] = 1/2 + 1/k multiplies the odds of the favoured value by
// L = (1/2 + 1/k)/(1/2 - 1/k); the optimal guesser's success probability
// grows by a factor of at most 2L/(1+L) = 1 + 2/k per coin.
struct OddsLedger {
  double p1 = 0.5;  // posterior P[F = 1]
  std::vector<double> odds_hist;
  static double odds(double p) { return p / (1.0 - p); }
  void observe(int d, int k);
};

// Two-player disclosure of the xor-shared bit F over k^3 + 1 coin reveals.
// halter (if nonzero) walks away after halt_after reveals; everyone guesses
// by majority of the coins they saw.
struct DiscloseResult {
  int guess = -1;
  int f_value = -1;       // the value an honest completed run converges on
  bool completed = false;
  int rounds_seen = 0;
};
DiscloseResult fair_disclose(Party& P, uint64_t my_f_share, int k, int halter = 0,
                             int halt_after = 0);

// ---- garbled gates ----

// Keyed expander treated as a random oracle at desk scale: one key yields a
// tag and two masks, each truncated to k bits.
struct PrgOut {
  uint64_t tag = 0, mask0 = 0, mask1 = 0;
  uint64_t mask(int b) const { return b ? mask1 : mask0; }
};
PrgOut prg_expand(uint64_t key, int k);

struct WireKeys {
  uint64_t k0 = 0, k1 = 0;  // indexed by claim bit; value = claim xor omega
  uint64_t at(int c) const { return c ? k1 : k0; }
};

// Four entries Tag(X_a), Tag(Y_b), Mask(b,X_a) xor Mask(a,Y_b) xor Z-key;
// the selected Z claim is g(a xor wx, b xor wy) xor wz. g is the truth
// table over actual wire values, index va*2 + vb.
struct YaoGate {
  int k = 16;
  struct Entry {
    uint64_t tx = 0, ty = 0, mz = 0;
  };
  std::array<Entry, 4> e;  // index a*2 + b
};
YaoGate yao_gate_encode(const std::array<int, 4>& g, const WireKeys& X, const WireKeys& Y,
                        const WireKeys& Z, int wx, int wy, int wz, int k);
// Least claim pair whose tags both match; nullopt when nothing matches
// (the tamper signal).
std::optional<uint64_t> yao_gate_decode(const YaoGate& g, uint64_t X, uint64_t Y);

// ---- two-party circuit evaluation ----

// Boolean circuit with two input owners; wire ids: player 1's bits, then
// player 2's bits, then one wire per gate in order.
struct BoolGate {
  int a = 0, b = 0;
  std::array<int, 4> g{};  // truth table over values, index va*2 + vb
};
struct BoolCircuit {
  int n1 = 0, n2 = 0;
  std::vector<BoolGate> gates;
  int out = 0;
};
int eval2_plain(const BoolCircuit& c, uint64_t x1, uint64_t x2);
// Player 1 garbles and transfers; player 2 picks up its input keys over the
// 1-out-of-2 channel, percolates, and alone learns the output (others get
// nullopt).
std::optional<int> eval2(Ctx& ctx, const BoolCircuit& c, uint64_t my_bits, int k = 16);

// ---- generalized n-contributor gate ----

// Entries carry n X-tags, n Y-tags and one masked Z key ((1+2n)k bits);
// contributors in the voided set S contribute zero tag and mask words.
struct GenGate {
  int n = 0, k = 16;
  std::vector<bool> voided;  // S, indexed 0..n-1
  struct Entry {
    std::vector<uint64_t> tx, ty;
    uint64_t mz = 0;
  };
  std::array<Entry, 4> e;
};
GenGate generalized_gate_encode(const std::array<int, 4>& g, const std::vector<WireKeys>& X,
                                const std::vector<WireKeys>& Y, const WireKeys& Z,
                                const std::vector<bool>& voided, int wx, int wy, int wz, int k);
// Throws std::invalid_argument when every contributor is voided.
std::optional<uint64_t> generalized_gate_decode(const GenGate& g,
                                                const std::vector<uint64_t>& X,
                                                const std::vector<uint64_t>& Y);

}  // namespace mpcw::fair
