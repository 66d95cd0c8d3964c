#include "mpcw/lrr.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mpcw/sharing.h"
#include "mpcw/zk.h"

namespace mpcw::lrr {

LrrSpec::LrrSpec(const Field& fld, int nvars_, int d_, int deg_)
    : f(&fld), nvars(nvars_), d(d_), deg(deg_), m(d_ * deg_ + 1) {
  if (d < 1 || deg < 0 || nvars < 0) throw std::invalid_argument("bad reduction parameters");
  if (m < d * deg + 1) throw std::invalid_argument("too few queries to interpolate");
  if (uint64_t(m) >= fld.order()) throw std::invalid_argument("field too small for query points");
}

std::vector<Query> lrr_query_coeffs(const LrrSpec& spec, const std::vector<uint64_t>& x,
                                    const std::vector<std::vector<uint64_t>>& coeffs) {
  const Field& f = *spec.f;
  std::vector<Query> ys(spec.m, Query(spec.nvars));
  for (int i = 1; i <= spec.m; ++i) {
    uint64_t u = f.from_int(i);
    for (int v = 0; v < spec.nvars; ++v) {
      uint64_t acc = v < int(x.size()) ? x[v] : 0, up = 1;
      for (int k = 0; k < spec.d; ++k) {
        up = f.mul(up, u);
        acc = f.add(acc, f.mul(coeffs[v][k], up));
      }
      ys[i - 1][v] = acc;
    }
  }
  return ys;
}

std::vector<Query> lrr_query(const LrrSpec& spec, const std::vector<uint64_t>& x, Rng& rng) {
  std::vector<std::vector<uint64_t>> coeffs(spec.nvars, std::vector<uint64_t>(spec.d));
  for (auto& c : coeffs)
    for (auto& v : c) v = rng.fe(*spec.f);
  return lrr_query_coeffs(spec, x, coeffs);
}

uint64_t lrr_interpolate(const LrrSpec& spec, const std::vector<uint64_t>& answers) {
  std::vector<std::pair<uint64_t, uint64_t>> pts;
  for (size_t i = 0; i < answers.size(); ++i) pts.push_back({spec.f->from_int(int(i) + 1), answers[i]});
  return lagrange_interpolate(*spec.f, pts).eval(0);
}

// ---------------- change of variables ----------------

int psi(int b, uint32_t eps, int q) { return (b - 1) * (1 << q) + int(eps) + 1; }

uint64_t GroupedPoly::eval_w(const Field& f, const std::vector<uint64_t>& w) const {
  uint64_t acc = 0;
  for (auto& t : terms) {
    uint64_t prod = t.coeff;
    for (int idx : t.w) prod = f.mul(prod, w[idx - 1]);
    acc = f.add(acc, prod);
  }
  return acc;
}

GroupedPoly change_variables(const Field& f, const cr::MultiPoly& poly, int q) {
  if (q < 1) throw std::invalid_argument("block size must be positive");
  GroupedPoly g;
  g.q = q;
  g.nvars = ((poly.nvars + q - 1) / q) * q;
  g.nblocks = g.nvars / q;
  g.nw = g.nblocks << q;
  std::map<std::vector<int>, uint64_t> acc;
  for (auto& [mask, coeff] : poly.terms) {
    std::vector<int> ws(g.nblocks);
    for (int b = 1; b <= g.nblocks; ++b) {
      uint32_t eps = (mask >> ((b - 1) * q)) & ((1u << q) - 1);
      ws[b - 1] = psi(b, eps, q);
    }
    acc[ws] = f.add(acc[ws], coeff);
  }
  for (auto& [ws, c] : acc)
    if (c != 0) g.terms.push_back({c, ws});
  return g;
}

std::vector<uint64_t> w_assignment(const Field& f, const GroupedPoly& g,
                                   const std::vector<uint64_t>& x) {
  std::vector<uint64_t> w(g.nw, 1);
  for (int b = 1; b <= g.nblocks; ++b)
    for (uint32_t eps = 0; eps < (1u << g.q); ++eps) {
      uint64_t prod = 1;
      for (int i = 0; i < g.q; ++i)
        if (eps & (1u << i)) {
          int v = (b - 1) * g.q + i;
          prod = f.mul(prod, v < int(x.size()) ? x[v] : 0);
        }
      w[psi(b, eps, g.q) - 1] = prod;
    }
  return w;
}

// ---------------- instance hiding, model 1 ----------------

static cr::MultiPoly restrict_last(const Field& f, const cr::MultiPoly& p, int nbits, int bitval) {
  cr::MultiPoly out;
  out.nvars = nbits - 1;
  uint32_t top = 1u << (nbits - 1);
  for (auto& [mask, c] : p.terms) {
    if (mask & top) {
      if (bitval) out.terms[mask ^ top] = f.add(out.terms[mask ^ top], c);
    } else {
      out.terms[mask] = f.add(out.terms[mask], c);
    }
  }
  return out;
}

Model1Run ihs_model1(const Field& f, const std::function<uint64_t(uint32_t)>& F, int nbits,
                     uint32_t x, Rng& rng, bool instantiate_last) {
  Model1Run run;
  std::vector<uint64_t> xbits(nbits);
  for (int i = 0; i < nbits; ++i) xbits[i] = (x >> i) & 1;
  auto cf = cr::canonical_poly(f, F, nbits);
  if (!instantiate_last) {
    LrrSpec spec(f, nbits, 1, nbits);  // nbits + 1 oracles
    run.queries = lrr_query(spec, xbits, rng);
    std::vector<uint64_t> zs;
    for (auto& qy : run.queries) {
      zs.push_back(cf.eval(f, qy));
      run.answers.push_back({zs.back()});
    }
    run.result = lrr_interpolate(spec, zs);
    return run;
  }
  // Hold the last bit back: blind only the first nbits-1 variables and have
  // each of the nbits oracles answer both restrictions of c_F.
  int nb = nbits - 1;
  LrrSpec spec(f, nb, 1, nb);
  std::vector<uint64_t> head(xbits.begin(), xbits.begin() + nb);
  run.queries = lrr_query(spec, head, rng);
  auto cf0 = restrict_last(f, cf, nbits, 0), cf1 = restrict_last(f, cf, nbits, 1);
  std::vector<uint64_t> z0, z1;
  for (auto& qy : run.queries) {
    z0.push_back(cf0.eval(f, qy));
    z1.push_back(cf1.eval(f, qy));
    run.answers.push_back({z0.back(), z1.back()});
  }
  run.result = xbits[nb] ? lrr_interpolate(spec, z1) : lrr_interpolate(spec, z0);
  return run;
}

// ---------------- instance hiding, model 2 ----------------

Model2Scheme make_model2(const std::function<int(int, uint32_t)>& chiS, int n_max, Rng& rng) {
  Model2Scheme s;
  s.n_max = n_max;
  s.v.assign(n_max + 1, 0);
  s.b1.assign(n_max + 1, 0);
  s.b2.assign(n_max + 1, 0);
  s.rv.resize(n_max + 1);
  s.srv.resize(n_max + 1);
  for (int n = 1; n <= n_max; ++n) {
    uint32_t mask = (1u << n) - 1;
    s.v[n] = uint32_t(rng.next()) & mask;
    s.b1[n] = uint32_t(rng.next()) & mask;
    s.b2[n] = s.v[n] ^ s.b1[n];
    std::vector<uint8_t> R(size_t(1) << n);
    for (auto& bit : R) bit = uint8_t(rng.bit());
    s.rv[n].resize(R.size());
    s.srv[n].resize(R.size());
    for (uint32_t y = 0; y < R.size(); ++y) {
      uint32_t pre = y ^ s.v[n];  // (X o V)(y) = X(y xor v_n)
      s.rv[n][y] = R[pre];
      s.srv[n][y] = uint8_t((chiS(n, pre) & 1) ^ R[pre]);
    }
  }
  return s;
}

Model2Run Model2Scheme::query(uint32_t x, int n) const {
  if (n < 1 || n > n_max) throw std::out_of_range("input length beyond the precomputed tables");
  Model2Run run;
  uint32_t mask = (1u << n) - 1;
  run.y = (x ^ b1[n] ^ b2[n]) & mask;
  run.o1_view = {uint64_t(n), run.y};
  run.o2_view = {uint64_t(n), run.y};
  run.result = rv[n][run.y] ^ srv[n][run.y];
  return run;
}

// ---------------- discrete log ----------------

static uint64_t powmod(uint64_t b, uint64_t e, uint64_t p) {
  unsigned __int128 acc = 1, base = b % p;
  while (e) {
    if (e & 1) acc = acc * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return uint64_t(acc);
}

DlogQuery dlog_query(uint64_t p, uint64_t g, uint64_t x, uint64_t r) {
  if (x % p == 0) throw std::domain_error("x outside the group");
  return {uint64_t((unsigned __int128)(x % p) * powmod(g, r, p) % p), r};
}

uint64_t dlog_oracle(uint64_t p, uint64_t g, uint64_t y) {
  for (uint64_t e = 0; e < p - 1; ++e)
    if (powmod(g, e, p) == y % p) return e;
  throw std::domain_error("no discrete log: y outside the group");
}

uint64_t dlog_unblind(uint64_t p, const DlogQuery& q, uint64_t answer) {
  uint64_t ord = p - 1;
  return (answer % ord + ord - q.r % ord) % ord;
}

uint64_t dlog_self_reduce(uint64_t p, uint64_t g, uint64_t x, Rng& rng) {
  DlogQuery q = dlog_query(p, g, x, rng.below(p - 1));
  return dlog_unblind(p, q, dlog_oracle(p, g, q.y));
}

// ---------------- EvalLog ----------------

using third::Party;
using third::Secret;

// Layered circuit computing a grouped polynomial from the w-inputs it
// actually references (pos maps 1-based w index -> input position): product
// trees on the odd layers, one summing linear gate on top.
static third::Circuit h_circuit(const GroupedPoly& gp, const std::map<int, int>& pos) {
  third::Circuit c;
  c.layers.resize(1);
  for (size_t i = 0; i < pos.size(); ++i) {
    third::Gate g;
    g.kind = third::Gate::Kind::Input;
    g.input_player = 1;
    c.layers[0].push_back(g);
  }
  std::vector<std::vector<std::pair<int, int>>> refs;
  for (auto& t : gp.terms) {
    std::vector<std::pair<int, int>> r;
    for (int idx : t.w) r.push_back({0, pos.at(idx)});
    refs.push_back(r);
  }
  int L = 1;
  for (;;) {
    bool more = false;
    for (auto& r : refs) more = more || r.size() > 1;
    if (!more) break;
    c.layers.resize(L + 1);
    for (auto& r : refs) {
      std::vector<std::pair<int, int>> next;
      size_t i = 0;
      for (; i + 1 < r.size(); i += 2) {
        third::Gate g;
        g.kind = third::Gate::Kind::Mul;
        g.ins = {r[i], r[i + 1]};
        next.push_back({L, int(c.layers[L].size())});
        c.layers[L].push_back(g);
      }
      if (i < r.size()) next.push_back(r[i]);
      r = next;
    }
    L += 2;  // keep product layers odd; the even layer between stays empty
  }
  int top = int(c.layers.size());
  if (top % 2 == 1) ++top;  // linear layers sit on even indices
  c.layers.resize(top + 1);
  third::Gate sum;
  sum.kind = third::Gate::Kind::Linear;
  sum.consts = {0};
  for (size_t k = 0; k < gp.terms.size(); ++k) {
    sum.consts.push_back(gp.terms[k].coeff);
    sum.ins.push_back(refs[k][0]);
  }
  c.layers[top].push_back(sum);
  c.outs = {{top, 0}};
  return c;
}

std::vector<uint64_t> eval_log(Party& P,
                               const std::vector<std::function<uint64_t(uint32_t)>>& tables,
                               int m, const std::vector<uint64_t>& my_bits, int q, int cheater,
                               std::vector<uint64_t>* my_query) {
  const Field& f = P.f;
  const int n = P.n, t = P.t;
  const int nm = n * m;

  std::vector<GroupedPoly> gps;
  for (auto& T : tables) gps.push_back(change_variables(f, cr::canonical_poly(f, T, nm), q));
  const int nblocks = gps.at(0).nblocks;
  if (nblocks * t + 1 > n)
    throw std::invalid_argument("output curve degree too high for the player count");

  // Only the w monomials that appear in some term are formed and blinded
  // (closed under the sub-patterns their product trees need), so a constant
  // function puts nothing input-dependent on the wire.
  std::set<int> need;
  std::function<void(int)> close = [&](int idx) {
    if (!need.insert(idx).second) return;
    int b = (idx - 1) / (1 << q) + 1;
    uint32_t eps = uint32_t((idx - 1) % (1 << q));
    if (__builtin_popcount(eps) >= 2) {
      uint32_t low = eps & -eps;
      close(psi(b, low, q));
      close(psi(b, eps ^ low, q));
    }
  };
  for (auto& gp : gps)
    for (auto& term : gp.terms)
      for (int idx : term.w) close(idx);
  std::map<int, int> pos;  // w index -> query position
  for (int idx : need) pos[idx] = int(pos.size());
  const int nq = int(pos.size());

  std::vector<third::Circuit> circuits;
  for (auto& gp : gps) circuits.push_back(h_circuit(gp, pos));

  // 1: every player verifiably shares its m bits.
  std::vector<std::pair<int, uint64_t>> deals;
  for (int i = 1; i <= n; ++i)
    for (int b = 0; b < m; ++b)
      deals.push_back({i, (i == P.ctx.id && b < int(my_bits.size())) ? my_bits[b] : 0});
  auto xs = third::vss_deal_many(P, deals);
  std::vector<Secret> vars(nblocks * q, Secret{0, true});
  for (int j = 0; j < nm; ++j) vars[j] = xs[j].ok ? xs[j] : Secret{0, true};

  // 2: needed block monomials; one batched multiply layer per subset size.
  const Secret one = third::linear_combine(P, {}, 1);
  std::map<int, Secret> wsec;
  for (int idx : need) {
    int b = (idx - 1) / (1 << q) + 1;
    uint32_t eps = uint32_t((idx - 1) % (1 << q));
    if (eps == 0) wsec[idx] = one;
    else if (__builtin_popcount(eps) == 1)
      wsec[idx] = vars[(b - 1) * q + __builtin_ctz(eps)];
  }
  for (int c = 2; c <= q; ++c) {
    std::vector<std::pair<Secret, Secret>> mults;
    std::vector<int> slots;
    for (int idx : need) {
      int b = (idx - 1) / (1 << q) + 1;
      uint32_t eps = uint32_t((idx - 1) % (1 << q));
      if (__builtin_popcount(eps) != c) continue;
      uint32_t low = eps & -eps;
      mults.push_back({wsec.at(psi(b, eps ^ low, q)), wsec.at(psi(b, low, q))});
      slots.push_back(idx);
    }
    if (mults.empty()) continue;
    auto prods = third::multiply_many(P, mults);
    for (size_t k = 0; k < slots.size(); ++k) wsec[slots[k]] = prods[k];
  }

  // 3: t jointly random blinding coefficients per formed monomial.
  auto coef = third::rand_secret_many(P, nq * t);

  // 4: the query shown to player i is the blinded point at alpha_i; all n
  // private reconstructions ride one round.
  std::vector<std::vector<Secret>> Q(n + 1);
  for (int i = 1; i <= n; ++i) {
    Q[i].resize(nq);
    std::vector<uint64_t> mine;
    for (auto& [idx, j] : pos) {
      std::vector<std::pair<uint64_t, Secret>> terms{{1, wsec.at(idx)}};
      uint64_t up = 1;
      for (int k = 0; k < t; ++k) {
        up = f.mul(up, P.alpha(i));
        terms.push_back({up, coef[j * t + k]});
      }
      Q[i][j] = third::linear_combine(P, terms, 0);
      mine.push_back(Q[i][j].piece);
    }
    P.ctx.send(i, std::move(mine));
  }
  auto inbox = P.ctx.round();
  std::vector<uint64_t> myq(nq);
  for (int j = 0; j < nq; ++j) {
    ShareSet ss{Scheme::Shamir, t, n, {}};
    for (int l = 1; l <= n; ++l) {
      if (!P.alive(l)) continue;
      const Msg* msg = Ctx::find(inbox, l);
      if (msg && j < int(msg->data.size())) ss.pieces[l] = msg->data[j];
    }
    auto v = shamir_reconstruct(f, ss, true);
    if (!v) throw std::runtime_error("query reconstruction failed");
    myq[j] = *v;
  }
  if (my_query) *my_query = myq;

  // 5: local evaluation of every grouped polynomial at the query; reshare.
  auto expand = [&](const std::vector<uint64_t>& compact) {
    std::vector<uint64_t> full(gps[0].nw, 0);
    for (auto& [idx, j] : pos) full[idx - 1] = compact[j];
    return full;
  };
  const int nbits_out = int(tables.size());
  std::vector<uint64_t> myv(nbits_out);
  auto myw = expand(myq);
  for (int b = 0; b < nbits_out; ++b) myv[b] = gps[b].eval_w(f, myw);
  if (cheater == P.ctx.id) myv[0] = f.add(myv[0], 1);
  std::vector<std::pair<int, uint64_t>> vdeals;
  for (int i = 1; i <= n; ++i)
    for (int b = 0; b < nbits_out; ++b) vdeals.push_back({i, i == P.ctx.id ? myv[b] : 0});
  auto vsh = third::vss_deal_many(P, vdeals);

  // 6: everyone checks every resharing (the check vector is revealed
  // publicly, so all players verify at once) and votes.
  std::vector<bool> good(n + 1, true);
  for (int i = 1; i <= n; ++i)
    for (int b = 0; b < nbits_out; ++b) {
      Secret claim = vsh[(i - 1) * nbits_out + b];
      good[i] = good[i] && claim.ok &&
                zk::prove_secret_predicate(P, i, 0, circuits[b], Q[i], claim,
                                           P.ctx.id == i ? myq : std::vector<uint64_t>{})
                    .accepted;
    }
  uint64_t ballot = 0;
  for (int i = 1; i <= n; ++i)
    if (!good[i]) ballot |= uint64_t(1) << i;
  P.ctx.broadcast({ballot});
  auto votes = P.ctx.round();
  std::vector<int> impeached;
  for (int i = 1; i <= n; ++i) {
    int against = 0;
    for (int l = 1; l <= n; ++l) {
      const Msg* msg = Ctx::find(votes, l, Channel::Broadcast);
      if (msg && !msg->data.empty() && (msg->data[0] >> i & 1)) ++against;
    }
    if (2 * against > n) impeached.push_back(i);
  }

  // 7: impeached players lose their privacy: their query is opened and
  // their contributions recomputed in public.
  std::map<int, std::vector<uint64_t>> pubv;
  for (int j : impeached) {
    P.disq.insert(j);
    auto qj = expand(third::reveal_many(P, Q[j]));
    for (int b = 0; b < nbits_out; ++b) pubv[j].push_back(gps[b].eval_w(f, qj));
  }

  // 8: each output curve has degree nblocks * t; its free term is a public
  // linear combination of the reshared values (constants for the impeached).
  std::vector<uint64_t> lam(n + 1);
  for (int i = 1; i <= n; ++i) {
    uint64_t num = 1, den = 1;
    for (int l = 1; l <= n; ++l) {
      if (l == i) continue;
      num = f.mul(num, f.sub(0, P.alpha(l)));
      den = f.mul(den, f.sub(P.alpha(i), P.alpha(l)));
    }
    lam[i] = f.div(num, den);
  }
  std::vector<Secret> outs;
  for (int b = 0; b < nbits_out; ++b) {
    std::vector<std::pair<uint64_t, Secret>> terms;
    uint64_t c0 = 0;
    for (int i = 1; i <= n; ++i) {
      if (pubv.count(i))
        c0 = f.add(c0, f.mul(lam[i], pubv[i][b]));
      else
        terms.push_back({lam[i], vsh[(i - 1) * nbits_out + b]});
    }
    outs.push_back(third::linear_combine(P, terms, c0));
  }
  return third::reveal_many(P, outs);
}

// ---------------- truth-table files ----------------

std::vector<uint8_t> parse_truth_table(const std::string& hex, int nbits) {
  size_t entries = size_t(1) << nbits;
  size_t nbytes = (entries + 7) / 8;
  std::vector<uint8_t> bytes;
  int hi = -1;
  for (char ch : hex) {
    if (ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r') continue;
    int d;
    if (ch >= '0' && ch <= '9') d = ch - '0';
    else if (ch >= 'a' && ch <= 'f') d = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') d = ch - 'A' + 10;
    else throw std::invalid_argument("bad hex digit in truth table");
    if (hi < 0) hi = d;
    else { bytes.push_back(uint8_t(hi << 4 | d)); hi = -1; }
  }
  if (hi >= 0 || bytes.size() != nbytes) throw std::invalid_argument("truth table length mismatch");
  std::vector<uint8_t> table(entries);
  for (size_t j = 0; j < entries; ++j) table[j] = bytes[j / 8] >> (j % 8) & 1;
  return table;
}

std::string dump_truth_table(const std::vector<uint8_t>& table) {
  std::vector<uint8_t> bytes((table.size() + 7) / 8, 0);
  for (size_t j = 0; j < table.size(); ++j)
    if (table[j] & 1) bytes[j / 8] |= uint8_t(1u << (j % 8));
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

std::vector<uint8_t> load_truth_table(const std::string& path, int nbits) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open truth table file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_truth_table(ss.str(), nbits);
}

}  // namespace mpcw::lrr
