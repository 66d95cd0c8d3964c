#pragma once
#include <optional>

#include "mpcw/netsim.h"
#include "mpcw/sharing.h"

// The t < n/2 suite: check-vector verifiable messages and time release,
// Rabin-style VSS with pieces-of-pieces, local linear combination, and
// multiplication backed by cut-and-choose product proofs. Check-vector
// material is minted by the simulator's ideal correlated-randomness
// channel (Ctx::cv_issue); forging a tag means guessing all k hidden bits.
namespace mpcw::half {

struct Party {
  Ctx& ctx;
  const Field& f;
  int t, n, k;  // k = check-vector rows per tag
  std::set<int> disq;
  Party(Ctx& c, const Field& fld, int t_, int k_ = 16) : ctx(c), f(fld), t(t_), n(c.n), k(k_) {
    if (2 * t >= n) throw std::invalid_argument("half suite needs 2t < n");
    if (uint64_t(n) >= f.order()) throw std::invalid_argument("field too small");
  }
  uint64_t alpha(int i) const { return f.from_int(i); }
  bool alive(int i) const { return disq.count(i) == 0; }
};

// A verifiably shared value. Every player holds a piece of a degree-`degree`
// polynomial, a sub-share of every other player's piece, tags protecting its
// own piece (one row set per checker), and key rows for every other owner.
// Reconstruction recovers poly(0); the public affine map (A, B) turns that
// into the secret (used after degree-reduction recovery).
struct Handle {
  uint64_t piece = 0;
  std::vector<uint64_t> sub;                                     // sub[j-1]: share of piece_j
  std::map<int, std::vector<uint64_t>> tags;                     // checker -> k tags
  std::map<int, std::vector<std::pair<uint64_t, uint64_t>>> keys;  // owner -> k (bit, pad)
  int degree = 0;
  uint64_t A = 1, B = 0;  // secret = A * poly(0) + B
  bool ok = true;
};

// Deal secrets with check-vector escort: pieces Shamir-shared at degree t,
// each piece sub-shared to everyone, and one tag/key row set issued per
// (owner, checker) pair. One network round for any number of deals.
std::vector<Handle> vss_half_many(Party& P, const std::vector<std::pair<int, uint64_t>>& deals);
Handle vss_half(Party& P, int dealer, uint64_t value);

// Broadcast pieces with their tags; each recipient filters pieces failing
// its key rows before interpolating. Throws if the surviving pieces are
// inconsistent with the handle's degree.
std::vector<uint64_t> reveal_half_many(Party& P, const std::vector<Handle>& hs);
uint64_t reveal_half(Party& P, const Handle& h);

// w = sum coeff_l * X_l + c0. Piece and sub-share arithmetic is local
// (zero rounds); with refresh=true each player issues fresh check vectors
// for its new piece (one round).
Handle linear_combine_half(Party& P, const std::vector<std::pair<uint64_t, Handle>>& terms,
                           uint64_t c0, bool refresh = true);

// Verifiable time release: S sends bit b to R via intermediary I using 2k
// one-time-pad triples; R reveals a random half so I can audit, and I
// releases the masked bit in phase two. Five fixed rounds; every player
// calls this (non-participants idle).
struct VtrOutcome {
  int i_verdict = -1;  // 1 accept, 0 reject (set for I)
  int r_verdict = -1;  // set for R
  int bit = -1;        // set for R on accept
};
// s_cheat: S garbles the gamma rows on a random k-subset, hoping it is
// exactly the half R never audits. i_forge: I tries to deliver the flipped
// bit, patching gammas with the audited alphas and guessing the rest.
VtrOutcome verifiable_time_release(Party& P, int S, int I, int R, int b, int k,
                                   bool s_cheat = false, bool i_forge = false);

// Cut-and-choose proof that c = a*b where alice dealt all three handles and
// knows the plaintexts (av, bv, cv are read only by alice). She deals 2k0
// triples (r_j, s_j, d_j = (a+r_j)(b+s_j)); a random k0-subset is opened as
// (a+r_j, b+s_j, d_j) and checked, the rest open (r_j, s_j) and the linear
// combination c_j = c - d_j + s_j a + r_j b + r_j s_j which must be zero.
// A cheater must guess the cut set exactly: probability <= 2^{-k0}.
// cut: injected cut set for exhaustive tests; cheat_guess: alice cheats,
// staying consistent only on her guessed subset.
bool prove_product_cutchoose(Party& P, int alice, const Handle& a, const Handle& b,
                             const Handle& c, uint64_t av, uint64_t bv, uint64_t cv, int k0,
                             const std::vector<int>* cut = nullptr,
                             const std::vector<int>* cheat_guess = nullptr);

// Each player reshapes its local product piece_i(X)*piece_i(Y), proves the
// product by cut-and-choose, and failed provers have their pieces publicly
// recovered from sub-shares; the degree-2t interpolation at zero is then a
// local linear combination. cheater (if nonzero) shares its product plus one.
Handle multiply_half(Party& P, const Handle& X, const Handle& Y, int k0 = 8, int cheater = 0);

// Publicly reconstruct player j's piece of every handle from sub-shares and
// adjust surviving pieces to a degree t-1 sharing via the quotient formula
// g(a_i) = [f(a_i) - M2(a_i) beta] / M1(a_i); the secret is recovered from
// the adjusted handle through its (A, B) map.
std::vector<Handle> recover_disqualified(Party& P, const std::vector<Handle>& hs, int j);

}  // namespace mpcw::half
