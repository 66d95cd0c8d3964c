#include "mpcw/mpc_half.h"

#include <algorithm>
#include <array>

namespace mpcw::half {

namespace {

Poly random_poly(Rng& rng, const Field& f, uint64_t free_term, int degree) {
  std::vector<uint64_t> c{free_term};
  for (int d = 1; d <= degree; ++d) c.push_back(rng.fe(f));
  return Poly(f, std::move(c));
}

// Interpolate a degree-<=d polynomial through the points and insist every
// point lies on it.
Poly consistent_interpolate(const Field& f, const std::vector<std::pair<uint64_t, uint64_t>>& pts,
                            int d) {
  if (int(pts.size()) < d + 1) throw std::runtime_error("too few surviving pieces");
  std::vector<std::pair<uint64_t, uint64_t>> head(pts.begin(), pts.begin() + d + 1);
  Poly p = lagrange_interpolate(f, head);
  for (auto& [x, y] : pts)
    if (p.eval(x) != y) throw std::runtime_error("inconsistent surviving pieces");
  return p;
}

std::vector<int> distinct_indices(Rng& rng, int count, int range) {
  std::vector<int> all(range);
  for (int i = 0; i < range; ++i) all[i] = i;
  for (int i = 0; i < count; ++i) std::swap(all[i], all[i + int(rng.below(range - i))]);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

std::vector<Handle> vss_half_many(Party& P, const std::vector<std::pair<int, uint64_t>>& deals) {
  const Field& f = P.f;
  const int me = P.ctx.id;
  // per-recipient payload: [piece, sub_1..sub_n] per item dealt by me
  std::map<int, std::vector<uint64_t>> payload;
  for (size_t idx = 0; idx < deals.size(); ++idx) {
    auto [dealer, value] = deals[idx];
    if (dealer != me) continue;
    Poly p = random_poly(P.ctx.rng, f, value % f.order(), P.t);
    std::vector<Poly> q;
    for (int j = 1; j <= P.n; ++j) q.push_back(random_poly(P.ctx.rng, f, p.eval(P.alpha(j)), P.t));
    for (int i = 1; i <= P.n; ++i) {
      payload[i].push_back(p.eval(P.alpha(i)));
      for (int j = 1; j <= P.n; ++j) payload[i].push_back(q[j - 1].eval(P.alpha(i)));
      for (int j = 1; j <= P.n; ++j)
        if (j != i) P.ctx.cv_issue(i, j, p.eval(P.alpha(i)), P.k, idx);
    }
  }
  for (int i = 1; i <= P.n; ++i)
    if (payload.count(i)) P.ctx.send(i, payload[i]);
  auto inbox = P.ctx.round();

  std::vector<Handle> out(deals.size());
  std::map<int, size_t> cursor;
  for (size_t idx = 0; idx < deals.size(); ++idx) {
    int dealer = deals[idx].first;
    const Msg* m = Ctx::find(inbox, dealer, Channel::Private);
    Handle& h = out[idx];
    h.degree = P.t;
    size_t& cur = cursor[dealer];
    if (!m || cur + 1 + P.n > m->data.size()) {
      h.ok = false;
      cur += 1 + P.n;
      continue;
    }
    h.piece = m->data[cur++];
    for (int j = 1; j <= P.n; ++j) h.sub.push_back(m->data[cur++]);
  }
  for (const Msg& m : inbox) {
    if (m.ch == Channel::CVTag && m.data.size() >= 2) {
      size_t idx = m.data[1];
      if (idx < out.size() && deals[idx].first == m.from)
        out[idx].tags[int(m.data[0])] = std::vector<uint64_t>(m.data.begin() + 2, m.data.end());
    } else if (m.ch == Channel::CVKey && m.data.size() >= 2) {
      size_t idx = m.data[1];
      if (idx < out.size() && deals[idx].first == m.from) {
        auto& rows = out[idx].keys[int(m.data[0])];
        for (size_t w = 2; w + 1 < m.data.size(); w += 2) rows.push_back({m.data[w], m.data[w + 1]});
      }
    }
  }
  return out;
}

Handle vss_half(Party& P, int dealer, uint64_t value) {
  return vss_half_many(P, {{dealer, value}})[0];
}

std::vector<uint64_t> reveal_half_many(Party& P, const std::vector<Handle>& hs) {
  const Field& f = P.f;
  const int me = P.ctx.id;
  const size_t width = 1 + size_t(P.n - 1) * P.k;
  std::vector<uint64_t> bcast;
  for (const Handle& h : hs) {
    bcast.push_back(h.piece);
    for (int j = 1; j <= P.n; ++j) {
      if (j == me) continue;
      auto it = h.tags.find(j);
      for (int l = 0; l < P.k; ++l)
        bcast.push_back(it != h.tags.end() && l < int(it->second.size()) ? it->second[l] : 0);
    }
  }
  P.ctx.broadcast(bcast);
  auto inbox = P.ctx.round();

  std::vector<uint64_t> out;
  for (size_t hi = 0; hi < hs.size(); ++hi) {
    const Handle& h = hs[hi];
    std::vector<std::pair<uint64_t, uint64_t>> pts;
    for (int o = 1; o <= P.n; ++o) {
      if (!P.alive(o)) continue;
      if (o == me) {
        pts.push_back({P.alpha(o), h.piece});
        continue;
      }
      auto data = Ctx::from(inbox, o, Channel::Broadcast);
      if (data.size() < width * hs.size()) continue;
      size_t base = hi * width;
      uint64_t piece = data[base];
      auto key = h.keys.find(o);
      if (key != h.keys.end() && int(key->second.size()) >= P.k) {
        // my tag block inside o's broadcast: checkers j != o in ascending order
        int slot = 0;
        for (int j = 1; j <= P.n; ++j) {
          if (j == o) continue;
          if (j == me) break;
          ++slot;
        }
        bool good = true;
        for (int l = 0; l < P.k; ++l) {
          uint64_t tag = data[base + 1 + size_t(slot) * P.k + l];
          auto [bit, pad] = key->second[l];
          if (tag != f.add(pad, bit ? piece : 0)) good = false;
        }
        if (!good) continue;
      }
      pts.push_back({P.alpha(o), piece});
    }
    Poly p = consistent_interpolate(f, pts, h.degree);
    out.push_back(f.add(f.mul(h.A, p.eval(0)), h.B));
  }
  return out;
}

uint64_t reveal_half(Party& P, const Handle& h) { return reveal_half_many(P, {h})[0]; }

Handle linear_combine_half(Party& P, const std::vector<std::pair<uint64_t, Handle>>& terms,
                           uint64_t c0, bool refresh) {
  const Field& f = P.f;
  Handle w;
  w.piece = 0;
  w.B = c0 % f.order();
  w.degree = 0;
  bool full_sub = !terms.empty();
  for (auto& [coef, h] : terms) {
    uint64_t cc = f.mul(coef % f.order(), h.A);
    w.piece = f.add(w.piece, f.mul(cc, h.piece));
    w.B = f.add(w.B, f.mul(coef % f.order(), h.B));
    w.degree = std::max(w.degree, h.degree);
    w.ok = w.ok && h.ok;
    if (int(h.sub.size()) != P.n) full_sub = false;
  }
  if (full_sub) {
    w.sub.assign(P.n, 0);
    for (auto& [coef, h] : terms) {
      uint64_t cc = f.mul(coef % f.order(), h.A);
      for (int j = 0; j < P.n; ++j) w.sub[j] = f.add(w.sub[j], f.mul(cc, h.sub[j]));
    }
  }
  if (refresh) {
    for (int j = 1; j <= P.n; ++j)
      if (j != P.ctx.id) P.ctx.cv_issue(P.ctx.id, j, w.piece, P.k, 0);
    auto inbox = P.ctx.round();
    for (const Msg& m : inbox) {
      if (m.ch == Channel::CVTag && m.data.size() >= 2)
        w.tags[int(m.data[0])] = std::vector<uint64_t>(m.data.begin() + 2, m.data.end());
      else if (m.ch == Channel::CVKey && m.data.size() >= 2) {
        auto& rows = w.keys[int(m.data[0])];
        for (size_t v = 2; v + 1 < m.data.size(); v += 2) rows.push_back({m.data[v], m.data[v + 1]});
      }
    }
  }
  return w;
}

VtrOutcome verifiable_time_release(Party& P, int S, int I, int R, int b, int k, bool s_cheat,
                                   bool i_forge) {
  const Field& f = P.f;
  const int me = P.ctx.id;
  VtrOutcome out;
  auto mask0 = [&](uint64_t bit, uint64_t al) { return bit ? f.sub(1, al) : 0; };
  auto mask1 = [&](uint64_t bit, uint64_t al) { return bit ? al : 0; };

  // round 1: S distributes the pad to R and the masked table to I
  if (me == S) {
    uint64_t b_I = P.ctx.rng.bit() ? 1 : 0;
    uint64_t b_R = uint64_t(b) ^ b_I;
    std::vector<uint64_t> to_r{b_R}, to_i{b_I};
    std::vector<std::array<uint64_t, 2>> gam;
    for (int i = 0; i < 2 * k; ++i) {
      uint64_t al = P.ctx.rng.bit() ? 1 : 0;
      uint64_t b0 = P.ctx.rng.fe(f), b1 = P.ctx.rng.fe(f);
      to_r.push_back(al);
      to_r.push_back(b0);
      to_r.push_back(b1);
      gam.push_back({f.add(b0, mask0(b_I, al)), f.add(b1, mask1(b_I, al))});
    }
    if (s_cheat)
      for (int i : distinct_indices(P.ctx.rng, k, 2 * k)) {
        gam[i][0] = f.add(gam[i][0], 1);
        gam[i][1] = f.add(gam[i][1], 1);
      }
    for (auto& g : gam) {
      to_i.push_back(g[0]);
      to_i.push_back(g[1]);
    }
    P.ctx.send(R, to_r);
    P.ctx.send(I, to_i);
  }
  auto in1 = P.ctx.round();
  std::vector<uint64_t> table = me == R ? Ctx::from(in1, S) : std::vector<uint64_t>{};
  std::vector<uint64_t> masked = me == I ? Ctx::from(in1, S) : std::vector<uint64_t>{};

  // round 2: I picks the audit half
  std::vector<int> cut;
  if (me == I) {
    cut = distinct_indices(P.ctx.rng, k, 2 * k);
    std::vector<uint64_t> msg(cut.begin(), cut.end());
    P.ctx.send(R, msg);
  }
  auto in2 = P.ctx.round();
  if (me == R)
    for (uint64_t w : Ctx::from(in2, I)) cut.push_back(int(w));

  // round 3: R reveals the audited triples
  if (me == R) {
    std::vector<uint64_t> msg;
    for (int i : cut)
      for (int w = 0; w < 3; ++w) msg.push_back(table.at(1 + 3 * size_t(i) + w));
    P.ctx.send(I, msg);
  }
  auto in3 = P.ctx.round();
  std::vector<uint64_t> audited = me == I ? Ctx::from(in3, R) : std::vector<uint64_t>{};

  // round 4: I audits and announces its verdict
  if (me == I) {
    uint64_t b_I = masked.at(0);
    int verdict = 1;
    for (size_t j = 0; j < cut.size(); ++j) {
      uint64_t al = audited.at(3 * j), b0 = audited.at(3 * j + 1), b1 = audited.at(3 * j + 2);
      uint64_t g0 = masked.at(1 + 2 * size_t(cut[j]));
      uint64_t g1 = masked.at(2 + 2 * size_t(cut[j]));
      if (g0 != f.add(b0, mask0(b_I, al)) || g1 != f.add(b1, mask1(b_I, al))) verdict = 0;
    }
    out.i_verdict = verdict;
    P.ctx.broadcast({uint64_t(verdict)});
  }
  auto in4 = P.ctx.round();
  int i_verdict = 1;
  if (me == R) {
    auto v = Ctx::from(in4, I, Channel::Broadcast);
    if (!v.empty()) i_verdict = int(v[0]);
  }

  // round 5 (phase II): I releases the bit; R checks every row
  if (me == I) {
    uint64_t b_I = masked.at(0);
    std::vector<uint64_t> msg;
    if (!i_forge) {
      msg = masked;
    } else {
      uint64_t flip = b_I ^ 1;
      msg.push_back(flip);
      std::vector<int> known(2 * k, -1);
      for (size_t j = 0; j < cut.size(); ++j) known[cut[j]] = int(audited.at(3 * j));
      for (int i = 0; i < 2 * k; ++i) {
        uint64_t al = known[i] >= 0 ? uint64_t(known[i]) : (P.ctx.rng.bit() ? 1 : 0);
        uint64_t g0 = masked.at(1 + 2 * size_t(i)), g1 = masked.at(2 + 2 * size_t(i));
        g0 = f.add(f.sub(g0, mask0(b_I, al)), mask0(flip, al));
        g1 = f.add(f.sub(g1, mask1(b_I, al)), mask1(flip, al));
        msg.push_back(g0);
        msg.push_back(g1);
      }
    }
    P.ctx.send(R, msg);
  }
  auto in5 = P.ctx.round();
  if (me == R) {
    auto msg = Ctx::from(in5, I);
    uint64_t b_I = msg.at(0), b_R = table.at(0);
    int verdict = i_verdict;
    for (int i = 0; i < 2 * k; ++i) {
      uint64_t al = table.at(1 + 3 * size_t(i)), b0 = table.at(2 + 3 * size_t(i)),
               b1 = table.at(3 + 3 * size_t(i));
      if (msg.at(1 + 2 * size_t(i)) != f.add(b0, mask0(b_I, al)) ||
          msg.at(2 + 2 * size_t(i)) != f.add(b1, mask1(b_I, al)))
        verdict = 0;
    }
    out.r_verdict = verdict;
    if (verdict) out.bit = int((b_I ^ b_R) & 1);
  }
  return out;
}

bool prove_product_cutchoose(Party& P, int alice, const Handle& a, const Handle& b,
                             const Handle& c, uint64_t av, uint64_t bv, uint64_t cv, int k0,
                             const std::vector<int>* cut, const std::vector<int>* cheat_guess) {
  const Field& f = P.f;
  const int m = 2 * k0;
  std::vector<std::pair<int, uint64_t>> deals(3 * size_t(m), {alice, 0});
  std::vector<uint64_t> rv(m), sv(m);
  if (P.ctx.id == alice) {
    std::set<int> guess;
    if (cheat_guess) guess.insert(cheat_guess->begin(), cheat_guess->end());
    uint64_t delta = f.sub(cv % f.order(), f.mul(av % f.order(), bv % f.order()));
    for (int j = 0; j < m; ++j) {
      rv[j] = P.ctx.rng.fe(f);
      sv[j] = P.ctx.rng.fe(f);
      uint64_t d = f.mul(f.add(av, rv[j]), f.add(bv, sv[j]));
      // a cheater stays honest on the guessed cut set and cooks the rest so
      // that the c_j checks come out zero
      if (cheat_guess && !guess.count(j)) d = f.add(d, delta);
      deals[j] = {alice, rv[j]};
      deals[m + j] = {alice, sv[j]};
      deals[2 * m + j] = {alice, d};
    }
  }
  auto hs = vss_half_many(P, deals);

  std::vector<int> Y;
  if (cut) {
    Y = *cut;
  } else {
    P.ctx.broadcast({P.ctx.rng.next()});
    auto inbox = P.ctx.round();
    uint64_t seed = 0;
    for (int i = 1; i <= P.n; ++i) {
      auto w = Ctx::from(inbox, i, Channel::Broadcast);
      if (!w.empty()) seed ^= w[0] * 0x9e3779b97f4a7c15ULL;
    }
    Rng pick(seed);
    Y = distinct_indices(pick, k0, m);
  }
  std::vector<bool> in_y(m, false);
  for (int j : Y) in_y[j] = true;

  // opened triples: (a + r_j, b + s_j, d_j)
  std::vector<Handle> open1;
  for (int j : Y) {
    open1.push_back(linear_combine_half(P, {{1, a}, {1, hs[j]}}, 0, false));
    open1.push_back(linear_combine_half(P, {{1, b}, {1, hs[m + j]}}, 0, false));
    open1.push_back(hs[2 * m + j]);
  }
  auto v1 = reveal_half_many(P, open1);
  bool good = true;
  for (size_t i = 0; i + 3 <= v1.size(); i += 3)
    if (v1[i + 2] != f.mul(v1[i], v1[i + 1])) good = false;

  // the rest: open r_j, s_j, then check c_j = c - d_j + s_j a + r_j b + r_j s_j
  std::vector<Handle> open2;
  for (int j = 0; j < m; ++j)
    if (!in_y[j]) {
      open2.push_back(hs[j]);
      open2.push_back(hs[m + j]);
    }
  auto v2 = reveal_half_many(P, open2);
  std::vector<Handle> open3;
  size_t pos = 0;
  for (int j = 0; j < m; ++j) {
    if (in_y[j]) continue;
    uint64_t rj = v2[pos], sj = v2[pos + 1];
    pos += 2;
    open3.push_back(linear_combine_half(
        P, {{1, c}, {f.neg(1), hs[2 * m + j]}, {sj, a}, {rj, b}}, f.mul(rj, sj), false));
  }
  for (uint64_t z : reveal_half_many(P, open3))
    if (z != 0) good = false;
  if (!good) P.disq.insert(alice);
  return good;
}

Handle multiply_half(Party& P, const Handle& X, const Handle& Y, int k0, int cheater) {
  const Field& f = P.f;
  const int me = P.ctx.id;
  uint64_t h_me = f.mul(X.piece, Y.piece);
  if (me == cheater) h_me = f.add(h_me, 1);
  std::vector<std::pair<int, uint64_t>> deals;
  for (int i = 1; i <= P.n; ++i) deals.push_back({i, i == me ? h_me : 0});
  auto hs = vss_half_many(P, deals);

  std::vector<bool> okp(P.n + 1, true);
  for (int i = 1; i <= P.n; ++i) {
    Handle pa, pb;
    pa.piece = X.sub[i - 1];
    pb.piece = Y.sub[i - 1];
    pa.degree = pb.degree = P.t;
    okp[i] = prove_product_cutchoose(P, i, pa, pb, hs[i - 1], X.piece, Y.piece, h_me, k0);
  }

  std::vector<uint64_t> lam;
  std::vector<uint64_t> nodes;
  for (int i = 1; i <= P.n; ++i) nodes.push_back(P.alpha(i));
  for (int i = 0; i < P.n; ++i) lam.push_back(lagrange_coeff(f, nodes, i, 0));

  uint64_t c0 = 0;
  bool any_failed = false;
  for (int i = 1; i <= P.n; ++i) any_failed |= !okp[i];
  std::map<int, uint64_t> recovered;
  if (any_failed) {
    std::vector<uint64_t> bc;
    for (int i = 1; i <= P.n; ++i)
      if (!okp[i]) {
        bc.push_back(X.sub[i - 1]);
        bc.push_back(Y.sub[i - 1]);
      }
    P.ctx.broadcast(bc);
    auto inbox = P.ctx.round();
    size_t slot = 0;
    for (int i = 1; i <= P.n; ++i) {
      if (okp[i]) continue;
      std::vector<std::pair<uint64_t, uint64_t>> px, py;
      for (int o = 1; o <= P.n; ++o) {
        if (!okp[o] || !P.alive(o)) continue;  // the failed prover may lie here too
        auto data = o == me ? bc : Ctx::from(inbox, o, Channel::Broadcast);
        if (data.size() < 2 * (slot + 1)) continue;
        px.push_back({P.alpha(o), data[2 * slot]});
        py.push_back({P.alpha(o), data[2 * slot + 1]});
      }
      uint64_t vx = consistent_interpolate(f, px, P.t).eval(0);
      uint64_t vy = consistent_interpolate(f, py, P.t).eval(0);
      recovered[i] = f.mul(vx, vy);
      ++slot;
    }
  }
  std::vector<std::pair<uint64_t, Handle>> terms;
  for (int i = 1; i <= P.n; ++i) {
    if (okp[i])
      terms.push_back({lam[i - 1], hs[i - 1]});
    else
      c0 = f.add(c0, f.mul(lam[i - 1], recovered[i]));
  }
  return linear_combine_half(P, terms, c0, true);
}

std::vector<Handle> recover_disqualified(Party& P, const std::vector<Handle>& hs, int j) {
  if (j == 0) return hs;
  const Field& f = P.f;
  std::vector<uint64_t> bc;
  for (const Handle& h : hs) bc.push_back(j - 1 < int(h.sub.size()) ? h.sub[j - 1] : 0);
  P.ctx.broadcast(bc);
  auto inbox = P.ctx.round();
  std::vector<uint64_t> beta;
  for (size_t hi = 0; hi < hs.size(); ++hi) {
    std::vector<std::pair<uint64_t, uint64_t>> pts;
    for (int o = 1; o <= P.n; ++o) {
      if (o == j || !P.alive(o)) continue;
      auto data = o == P.ctx.id ? bc : Ctx::from(inbox, o, Channel::Broadcast);
      if (data.size() > hi) pts.push_back({P.alpha(o), data[hi]});
    }
    beta.push_back(consistent_interpolate(f, pts, P.t).eval(0));
  }
  P.disq.insert(j);

  // m1 over t surviving nodes, m2 = (u - alpha_j); the CRT pair M1, M2
  // satisfies M1(node)=1, M2(node)=0 on m1's nodes and the reverse at j
  std::vector<int> nodes;
  for (int i = 1; i <= P.n && int(nodes.size()) < P.t; ++i)
    if (i != j && P.alive(i)) nodes.push_back(i);
  Poly m1 = Poly::constant(f, 1);
  for (int i : nodes) m1 = m1 * Poly(f, {f.neg(P.alpha(i)), 1});
  uint64_t aj = P.alpha(j);
  uint64_t m1aj = m1.eval(aj);
  Poly m2(f, {f.neg(aj), 1});
  Poly q = (m1 - Poly::constant(f, m1aj)).divmod(m2).first.scale(f.neg(f.inv(m1aj)));
  Poly M1 = q * m2;
  Poly M2 = m1.scale(f.inv(m1aj));

  std::vector<Handle> out;
  for (size_t hi = 0; hi < hs.size(); ++hi) {
    const Handle& h = hs[hi];
    uint64_t b = beta[hi];
    Handle g;
    g.degree = h.degree - 1;
    if (P.ctx.id != j) {
      uint64_t m1me = M1.eval(P.alpha(P.ctx.id));
      if (m1me == 0) throw std::runtime_error("degenerate recovery node");
      g.piece = f.mul(f.sub(h.piece, f.mul(M2.eval(P.alpha(P.ctx.id)), b)), f.inv(m1me));
    }
    if (int(h.sub.size()) == P.n) {
      g.sub.assign(P.n, 0);
      for (int l = 1; l <= P.n; ++l) {
        if (l == j) continue;
        uint64_t m1l = M1.eval(P.alpha(l));
        if (m1l == 0) throw std::runtime_error("degenerate recovery node");
        g.sub[l - 1] = f.mul(f.sub(h.sub[l - 1], f.mul(M2.eval(P.alpha(l)), b)), f.inv(m1l));
      }
    }
    g.A = f.mul(h.A, M1.eval(0));
    g.B = f.add(f.mul(h.A, f.mul(M2.eval(0), b)), h.B);
    g.ok = h.ok;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace mpcw::half
