#pragma once
#include <functional>
#include <string>

#include "mpcw/constrounds.h"
#include "mpcw/field.h"
#include "mpcw/rng.h"

// Locally random reductions: blind an input behind random low-degree
// polynomials, farm the blinded points out to oracles, interpolate the
// answers. Also the two instance-hiding schemes built on them, the
// discrete-log self-reduction, and the EvalLog protocol that evaluates an
// arbitrary function in constant rounds when t*m = O(log n).
namespace mpcw::lrr {

// A (d, m) reduction of a degree-`deg` polynomial in `nvars` variables:
// each variable is blinded by a random degree-d polynomial with the
// variable as free term, and m = d*deg + 1 evaluation points determine the
// composed curve. Any d-subset of queries is distributed independently of
// the input.
struct LrrSpec {
  const Field* f = nullptr;
  int nvars = 0;
  int d = 1;    // blinding degree = independence bound
  int deg = 0;  // degree of the target polynomial
  int m = 0;    // query count
  LrrSpec(const Field& fld, int nvars_, int d_, int deg_);
};

using Query = std::vector<uint64_t>;

// Queries y_i = (p_1(i), ..., p_N(i)) for i = 1..m. The second form takes
// the blinding coefficients explicitly (coeffs[var] = c_1..c_d) so tests
// can enumerate every draw.
std::vector<Query> lrr_query(const LrrSpec& spec, const std::vector<uint64_t>& x, Rng& rng);
std::vector<Query> lrr_query_coeffs(const LrrSpec& spec, const std::vector<uint64_t>& x,
                                    const std::vector<std::vector<uint64_t>>& coeffs);
// Free term of the interpolant through (i, answers[i-1]); with honest
// oracle answers this equals f(x).
uint64_t lrr_interpolate(const LrrSpec& spec, const std::vector<uint64_t>& answers);

// ---- change of variables ----
//
// Group the variables into blocks of q; one new variable w per block and
// per subset of the block, valued at the monomial over that subset (the
// empty subset gives the constant 1). A degree-n multilinear polynomial
// becomes degree n/q over the w's. 1-based w index of block b (1-based)
// with subset pattern eps: (b-1)*2^q + eps + 1.
int psi(int b, uint32_t eps, int q);

struct GroupedPoly {
  int nvars = 0;  // original variable count padded to a multiple of q
  int q = 1;
  int nblocks = 0;
  int nw = 0;  // nblocks * 2^q
  struct Term {
    uint64_t coeff = 0;
    std::vector<int> w;  // one w index per block (unit w for untouched blocks)
  };
  std::vector<Term> terms;
  int degree() const { return nblocks; }
  uint64_t eval_w(const Field& f, const std::vector<uint64_t>& w) const;
};
GroupedPoly change_variables(const Field& f, const cr::MultiPoly& poly, int q);
// The w values induced by an assignment to the original variables.
std::vector<uint64_t> w_assignment(const Field& f, const GroupedPoly& g,
                                   const std::vector<uint64_t>& x);

// ---- instance hiding, model 1 ----
//
// nbits+1 oracles each receive one blinded point and answer the canonical
// polynomial c_F there; the querier interpolates. Every oracle's view is a
// uniform point of E^nbits regardless of x. instantiate_last trades one
// oracle away: the last bit is held back and each of the remaining nbits
// oracles answers both restrictions c_F|x_n=0 and c_F|x_n=1 (the answer,
// not the query count, doubles).
struct Model1Run {
  uint64_t result = 0;
  std::vector<Query> queries;              // oracle i's received point
  std::vector<std::vector<uint64_t>> answers;  // oracle i's reply words
};
Model1Run ihs_model1(const Field& f, const std::function<uint64_t(uint32_t)>& F, int nbits,
                     uint32_t x, Rng& rng, bool instantiate_last = false);

// ---- instance hiding, model 2 ----
//
// Two non-communicating oracles hold masked membership tables: O_1 gets
// (chi_{R o V}, b_1) and O_2 gets (chi_{(S xor R) o V}, b_2) with
// b_2 = v_n xor b_1, where (X o V)(y) = X(y xor v_n). The querier sends n,
// learns b_1 and b_2, queries both at y = x xor b_1 xor b_2 and xors the
// answers. Tables are explicit up to n_max bits.
struct Model2Run {
  int result = -1;
  uint32_t y = 0;
  std::vector<uint64_t> o1_view, o2_view;  // everything each oracle saw: [n, y]
};
struct Model2Scheme {
  int n_max = 8;
  std::vector<uint32_t> v, b1, b2;              // index n = 1..n_max
  std::vector<std::vector<uint8_t>> rv, srv;    // per-n tables of size 2^n
  Model2Run query(uint32_t x, int n) const;     // throws if n > n_max
};
Model2Scheme make_model2(const std::function<int(int, uint32_t)>& chiS, int n_max, Rng& rng);

// ---- discrete-log self-reduction ----
//
// Blind x in Z_p^* as y = x * g^r, ask the (brute-force) oracle for the
// index of y, subtract r mod p-1.
struct DlogQuery {
  uint64_t y = 0;
  uint64_t r = 0;
};
DlogQuery dlog_query(uint64_t p, uint64_t g, uint64_t x, uint64_t r);
uint64_t dlog_oracle(uint64_t p, uint64_t g, uint64_t y);
uint64_t dlog_unblind(uint64_t p, const DlogQuery& q, uint64_t answer);
uint64_t dlog_self_reduce(uint64_t p, uint64_t g, uint64_t x, Rng& rng);

// ---- EvalLog ----
//
// Constant-round evaluation of arbitrary output bits F_b over the n*m input
// bits (m bits per player, player i owning bits m(i-1)+1..mi): share all
// bits, form the block-monomial w variables (blocks of q), blind each w
// with a random degree-t polynomial, reveal to each player i the point at
// alpha_i, have it locally evaluate the grouped polynomial h_b and reshare
// the result, prove the resharing correct (prove_secret_predicate with
// public check vector), vote out bad provers and recompute their values
// from their publicly opened queries, and finally interpolate the free
// term of each output curve as a local linear combination.
// tables[b] is the truth table of output bit b; cheater (if nonzero)
// reshares its first value plus one. my_query, when given, receives the
// blinded point this player was shown (its whole view of the secrets).
std::vector<uint64_t> eval_log(third::Party& P,
                               const std::vector<std::function<uint64_t(uint32_t)>>& tables,
                               int m, const std::vector<uint64_t>& my_bits, int q,
                               int cheater = 0, std::vector<uint64_t>* my_query = nullptr);

// ---- truth-table files ----
//
// Hex-encoded bitstring: 2^nbits table entries, entry j stored in bit
// (j mod 8) of byte floor(j/8), bytes written as two lowercase hex digits
// in order. parse/dump round-trip; load reads a whole file.
std::vector<uint8_t> parse_truth_table(const std::string& hex, int nbits);
std::string dump_truth_table(const std::vector<uint8_t>& table);
std::vector<uint8_t> load_truth_table(const std::string& path, int nbits);

}  // namespace mpcw::lrr
