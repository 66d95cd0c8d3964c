#include "mpcw/mpc_third.h"

#include <algorithm>
#include <sstream>

namespace mpcw::third {

namespace {

// Pull the packed vector a player sent this round, if any.
const std::vector<uint64_t>* payload(const std::vector<Msg>& inbox, int from,
                                     Channel ch = Channel::Private) {
  const Msg* m = Ctx::find(inbox, from, ch);
  return m ? &m->data : nullptr;
}

std::vector<uint64_t> node_set(Party& P) {
  std::vector<uint64_t> xs;
  for (int i = 1; i <= P.n; ++i) xs.push_back(P.alpha(i));
  return xs;
}

// Coefficients of the truncated Lagrange basis polynomial L_i mod u^(t+1),
// evaluated at x: interpolating through all n nodes then chopping to degree t
// maps a degree-2t value vector to the degree-t truncation of its polynomial.
uint64_t truncated_lagrange_coeff(Party& P, size_t i, uint64_t x) {
  const Field& f = P.f;
  auto xs = node_set(P);
  Poly basis = Poly::constant(f, 1);
  uint64_t den = 1;
  for (size_t j = 0; j < xs.size(); ++j) {
    if (j == i) continue;
    basis = basis * Poly(f, {f.neg(xs[j]), 1});
    den = f.mul(den, f.sub(xs[i], xs[j]));
  }
  basis = basis.scale(f.inv(den)).truncated(P.t);
  return basis.eval(x);
}

std::optional<uint64_t> robust_decode(Party& P, const std::vector<std::pair<uint64_t, uint64_t>>& pts,
                                      int degree) {
  int m = int(pts.size());
  if (m < degree + 1) return std::nullopt;
  int e = (m - degree - 1) / 2;
  auto p = decode_with_errors(P.f, pts, degree, e);
  if (!p) return std::nullopt;
  return p->eval(0);
}

}  // namespace

std::vector<Secret> share_plain_many(Party& P, const std::vector<std::pair<int, uint64_t>>& deals) {
  const Field& f = P.f;
  // Dealer draws a uniform degree-t polynomial per item and sends each
  // player its point; one packed message per recipient.
  std::vector<Poly> mine;
  for (auto& [dealer, secret] : deals) {
    if (dealer != P.ctx.id) { mine.emplace_back(); continue; }
    std::vector<uint64_t> cs(P.t + 1);
    cs[0] = secret;
    for (int j = 1; j <= P.t; ++j) cs[j] = P.ctx.rng.fe(f);
    mine.push_back(Poly(f, cs));
  }
  for (int i = 1; i <= P.n; ++i) {
    std::vector<uint64_t> pack;
    for (size_t k = 0; k < deals.size(); ++k)
      if (deals[k].first == P.ctx.id) pack.push_back(mine[k].eval(P.alpha(i)));
    if (!pack.empty()) P.ctx.send(i, std::move(pack));
  }
  auto inbox = P.ctx.round();
  std::vector<Secret> out(deals.size());
  std::map<int, size_t> cursor;
  for (size_t k = 0; k < deals.size(); ++k) {
    int d = deals[k].first;
    auto data = payload(inbox, d);
    size_t idx = cursor[d]++;
    if (data && idx < data->size())
      out[k].piece = (*data)[idx];
    else
      out[k].ok = false;
  }
  return out;
}

Secret share_plain(Party& P, int dealer, uint64_t secret) {
  return share_plain_many(P, {{dealer, secret}})[0];
}

Secret share_with_poly(Party& P, int dealer, const std::vector<uint64_t>& coeffs) {
  const Field& f = P.f;
  if (P.ctx.id == dealer) {
    Poly p(f, coeffs);
    for (int i = 1; i <= P.n; ++i) P.ctx.send(i, {p.eval(P.alpha(i))});
  }
  auto inbox = P.ctx.round();
  Secret s;
  auto data = payload(inbox, dealer);
  if (data && !data->empty())
    s.piece = (*data)[0];
  else
    s.ok = false;
  return s;
}

// ---------------- VSS ----------------

namespace {
struct VssLocal {
  Poly p_mine, q_mine;  // p_i(u) = p(u, a_i), q_i(v) = p(a_i, v)
  bool shape_ok = true;
  bool impeach = false;
};
}  // namespace

// Core VSS; `forced` (dealer side only) pins the restriction p(0,v) of item k
// to a given degree-t polynomial, which fixes piece_i = phi(alpha_i).
static std::vector<Secret> vss_deal_impl(Party& P, const std::vector<std::pair<int, uint64_t>>& deals,
                                         const std::vector<std::optional<Poly>>* forced) {
  const Field& f = P.f;
  const int n = P.n, t = P.t, me = P.ctx.id;
  const size_t m = deals.size();
  const size_t blk = 2 * size_t(t + 1);

  // V1: dealer draws a bivariate polynomial of degree <= t in each variable
  // with p(0,0) = secret and sends player i the restrictions p_i, q_i.
  std::vector<std::vector<std::vector<uint64_t>>> biv(m);  // [item][a][b]
  for (size_t k = 0; k < m; ++k) {
    if (deals[k].first != me) continue;
    auto& c = biv[k];
    c.assign(t + 1, std::vector<uint64_t>(t + 1));
    for (int a = 0; a <= t; ++a)
      for (int b = 0; b <= t; ++b) c[a][b] = P.ctx.rng.fe(f);
    c[0][0] = deals[k].second;
    if (forced && k < forced->size() && (*forced)[k])
      for (int b = 0; b <= t; ++b) c[0][b] = (*forced)[k]->coeff(b);
  }
  for (int i = 1; i <= n; ++i) {
    std::vector<uint64_t> pack;
    for (size_t k = 0; k < m; ++k) {
      if (deals[k].first != me) continue;
      uint64_t ai = P.alpha(i);
      for (int a = 0; a <= t; ++a) {  // p_i coeff of u^a
        uint64_t acc = 0, pw = 1;
        for (int b = 0; b <= t; ++b) { acc = f.add(acc, f.mul(biv[k][a][b], pw)); pw = f.mul(pw, ai); }
        pack.push_back(acc);
      }
      for (int b = 0; b <= t; ++b) {  // q_i coeff of v^b
        uint64_t acc = 0, pw = 1;
        for (int a = 0; a <= t; ++a) { acc = f.add(acc, f.mul(biv[k][a][b], pw)); pw = f.mul(pw, ai); }
        pack.push_back(acc);
      }
    }
    if (!pack.empty()) P.ctx.send(i, std::move(pack));
  }
  auto inbox = P.ctx.round();

  std::vector<VssLocal> loc(m);
  std::map<int, size_t> expect_words;
  for (auto& [d, s] : deals) expect_words[d] += blk;
  std::map<int, size_t> cur;
  for (size_t k = 0; k < m; ++k) {
    int d = deals[k].first;
    auto data = payload(inbox, d);
    size_t off = cur[d];
    cur[d] += blk;
    if (data && data->size() == expect_words[d] && off + blk <= data->size()) {
      std::vector<uint64_t> pc(data->begin() + off, data->begin() + off + t + 1);
      std::vector<uint64_t> qc(data->begin() + off + t + 1, data->begin() + off + blk);
      loc[k].p_mine = Poly(f, pc);
      loc[k].q_mine = Poly(f, qc);
    } else {
      loc[k].shape_ok = false;
    }
  }

  // V2: broadcast shape verdicts.
  {
    std::vector<uint64_t> pack;
    for (size_t k = 0; k < m; ++k) pack.push_back(loc[k].shape_ok ? 1 : 0);
    P.ctx.broadcast(std::move(pack));
  }
  inbox = P.ctx.round();
  std::vector<std::vector<uint64_t>> shape_ok(m, std::vector<uint64_t>(n + 1, 0));
  for (int i = 1; i <= n; ++i) {
    auto data = payload(inbox, i, Channel::Broadcast);
    for (size_t k = 0; k < m; ++k) shape_ok[k][i] = data && k < data->size() ? (*data)[k] : 0;
  }

  // V3: cross values p_mine(alpha_j) to every j.
  for (int j = 1; j <= n; ++j) {
    std::vector<uint64_t> pack;
    for (size_t k = 0; k < m; ++k)
      pack.push_back(loc[k].shape_ok ? loc[k].p_mine.eval(P.alpha(j)) : 0);
    P.ctx.send(j, std::move(pack));
  }
  inbox = P.ctx.round();
  // cross[k][j] = value received from j = p_j(alpha_me) = p(alpha_me, alpha_j)
  std::vector<std::vector<std::optional<uint64_t>>> cross(m,
      std::vector<std::optional<uint64_t>>(n + 1));
  for (int j = 1; j <= n; ++j) {
    auto data = payload(inbox, j);
    for (size_t k = 0; k < m; ++k)
      if (data && k < data->size()) cross[k][j] = (*data)[k];
  }

  // V4: complaint masks (bit j-1: j's cross value contradicts my q).
  {
    std::vector<uint64_t> pack;
    for (size_t k = 0; k < m; ++k) {
      uint64_t mask = 0;
      if (loc[k].shape_ok)
        for (int j = 1; j <= n; ++j)
          if (!cross[k][j] || *cross[k][j] != loc[k].q_mine.eval(P.alpha(j)))
            mask |= uint64_t(1) << (j - 1);
      pack.push_back(mask);
    }
    P.ctx.broadcast(std::move(pack));
  }
  inbox = P.ctx.round();
  std::vector<std::vector<uint64_t>> complaints(m, std::vector<uint64_t>(n + 1, 0));
  for (int i = 1; i <= n; ++i) {
    auto data = payload(inbox, i, Channel::Broadcast);
    for (size_t k = 0; k < m; ++k) complaints[k][i] = data && k < data->size() ? (*data)[k] : 0;
  }

  // V5: dealer publishes every disputed point p(alpha_i, alpha_j).
  {
    std::vector<uint64_t> pack;
    for (size_t k = 0; k < m; ++k) {
      if (deals[k].first != me) continue;
      std::vector<uint64_t> entries;
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
          if (complaints[k][i] >> (j - 1) & 1) {
            uint64_t v = 0, pwa = 1;
            for (int a = 0; a <= t; ++a) {
              uint64_t pwb = 1, row = 0;
              for (int b = 0; b <= t; ++b) { row = f.add(row, f.mul(biv[k][a][b], pwb)); pwb = f.mul(pwb, P.alpha(j)); }
              v = f.add(v, f.mul(row, pwa));
              pwa = f.mul(pwa, P.alpha(i));
            }
            entries.insert(entries.end(), {uint64_t(i), uint64_t(j), v});
          }
      pack.push_back(entries.size() / 3);
      pack.insert(pack.end(), entries.begin(), entries.end());
    }
    if (!pack.empty()) P.ctx.broadcast(std::move(pack));
  }
  inbox = P.ctx.round();
  // published[k] maps (i,j) -> v
  std::vector<std::map<std::pair<int, int>, uint64_t>> published(m);
  cur.clear();
  for (size_t k = 0; k < m; ++k) {
    int d = deals[k].first;
    auto data = payload(inbox, d, Channel::Broadcast);
    if (!data) continue;
    size_t off = cur[d];
    if (off >= data->size()) continue;
    uint64_t cnt = (*data)[off];
    size_t pos = off + 1;
    for (uint64_t e = 0; e < cnt && pos + 2 < data->size() + 1; ++e, pos += 3)
      published[k][{int((*data)[pos]), int((*data)[pos + 1])}] = (*data)[pos + 2];
    cur[d] = pos;
  }

  // V6: impeach if the published points contradict my own restrictions, or
  // if my copy was malformed, or a disputed point went unpublished.
  for (size_t k = 0; k < m; ++k) {
    bool imp = !loc[k].shape_ok;
    if (loc[k].shape_ok) {
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
          if (!(complaints[k][i] >> (j - 1) & 1)) continue;
          auto it = published[k].find({i, j});
          if (it == published[k].end()) { imp = true; continue; }
          if (i == me && it->second != loc[k].q_mine.eval(P.alpha(j))) imp = true;
          if (j == me && it->second != loc[k].p_mine.eval(P.alpha(i))) imp = true;
        }
    }
    loc[k].impeach = imp && deals[k].first != me;
  }
  {
    std::vector<uint64_t> pack;
    for (size_t k = 0; k < m; ++k) pack.push_back(loc[k].impeach ? 1 : 0);
    P.ctx.broadcast(std::move(pack));
  }
  inbox = P.ctx.round();
  std::vector<std::vector<uint64_t>> impeached(m, std::vector<uint64_t>(n + 1, 0));
  for (int i = 1; i <= n; ++i) {
    auto data = payload(inbox, i, Channel::Broadcast);
    for (size_t k = 0; k < m; ++k) impeached[k][i] = data && k < data->size() ? (*data)[k] : 0;
  }

  // V7: dealer publishes full restrictions for impeachers.
  {
    std::vector<uint64_t> pack;
    for (size_t k = 0; k < m; ++k) {
      if (deals[k].first != me) continue;
      std::vector<uint64_t> entries;
      for (int i = 1; i <= n; ++i) {
        if (!impeached[k][i]) continue;
        entries.push_back(uint64_t(i));
        uint64_t ai = P.alpha(i);
        for (int a = 0; a <= t; ++a) {
          uint64_t acc = 0, pw = 1;
          for (int b = 0; b <= t; ++b) { acc = f.add(acc, f.mul(biv[k][a][b], pw)); pw = f.mul(pw, ai); }
          entries.push_back(acc);
        }
        for (int b = 0; b <= t; ++b) {
          uint64_t acc = 0, pw = 1;
          for (int a = 0; a <= t; ++a) { acc = f.add(acc, f.mul(biv[k][a][b], pw)); pw = f.mul(pw, ai); }
          entries.push_back(acc);
        }
      }
      pack.push_back(entries.empty() ? 0 : entries.size() / (1 + blk));
      pack.insert(pack.end(), entries.begin(), entries.end());
    }
    if (!pack.empty()) P.ctx.broadcast(std::move(pack));
  }
  inbox = P.ctx.round();
  std::vector<std::map<int, std::pair<Poly, Poly>>> republished(m);
  cur.clear();
  for (size_t k = 0; k < m; ++k) {
    int d = deals[k].first;
    auto data = payload(inbox, d, Channel::Broadcast);
    if (!data) continue;
    size_t off = cur[d];
    if (off >= data->size()) continue;
    uint64_t cnt = (*data)[off];
    size_t pos = off + 1;
    for (uint64_t e = 0; e < cnt && pos + blk < data->size() + 1; ++e) {
      int i = int((*data)[pos]);
      std::vector<uint64_t> pc(data->begin() + pos + 1, data->begin() + pos + 1 + t + 1);
      std::vector<uint64_t> qc(data->begin() + pos + 1 + t + 1, data->begin() + pos + 1 + blk);
      republished[k][i] = {Poly(f, pc), Poly(f, qc)};
      pos += 1 + blk;
    }
    cur[d] = pos;
  }

  // V8: every player evaluates the public record: each impeacher must have a
  // republished pair consistent with every published point; plus a personal
  // recheck of the republications against one's own restrictions.
  std::vector<uint64_t> final_bad(m, 0);
  for (size_t k = 0; k < m; ++k) {
    bool bad = false;
    for (int i = 1; i <= n; ++i) {
      if (!impeached[k][i]) continue;
      auto it = republished[k].find(i);
      if (it == republished[k].end()) { bad = true; continue; }
      auto& [pi, qi] = it->second;
      if (pi.degree() > t || qi.degree() > t) bad = true;
      for (auto& [ij, v] : published[k]) {
        auto [ci, cj] = ij;
        if (ci == i && qi.eval(P.alpha(cj)) != v) bad = true;
        if (cj == i && pi.eval(P.alpha(ci)) != v) bad = true;
      }
    }
    if (loc[k].shape_ok && deals[k].first != me) {
      for (auto& [i, pq] : republished[k]) {
        if (i == me) continue;
        // cross-consistency with my own copy: p_i(a_me) = q_me(a_i), q_i(a_me) = p_me(a_i)
        if (pq.first.eval(P.alpha(me)) != loc[k].q_mine.eval(P.alpha(i))) bad = true;
        if (pq.second.eval(P.alpha(me)) != loc[k].p_mine.eval(P.alpha(i))) bad = true;
      }
    }
    if (loc[k].impeach && !republished[k].count(me)) bad = true;
    final_bad[k] = bad ? 1 : 0;
  }
  P.ctx.broadcast(std::vector<uint64_t>(final_bad));
  inbox = P.ctx.round();
  std::vector<int> bad_count(m, 0);
  for (int i = 1; i <= n; ++i) {
    auto data = payload(inbox, i, Channel::Broadcast);
    for (size_t k = 0; k < m; ++k)
      if (data && k < data->size() && (*data)[k]) bad_count[k]++;
  }

  std::vector<Secret> out(m);
  for (size_t k = 0; k < m; ++k) {
    int impeachers = 0;
    for (int i = 1; i <= n; ++i)
      if (impeached[k][i]) ++impeachers;
    bool rejected = impeachers >= t + 1 || bad_count[k] >= t + 1;
    if (rejected) {
      out[k] = {0, false};
      P.disq.insert(deals[k].first);
      continue;
    }
    Poly eff = loc[k].p_mine;
    auto it = republished[k].find(me);
    if (it != republished[k].end()) eff = it->second.first;  // adopt the fix
    out[k].piece = eff.is_zero() ? 0 : eff.eval(0);
    out[k].ok = true;
  }
  return out;
}

std::vector<Secret> vss_deal_many(Party& P, const std::vector<std::pair<int, uint64_t>>& deals) {
  return vss_deal_impl(P, deals, nullptr);
}

Secret vss_deal(Party& P, int dealer, uint64_t secret) {
  return vss_deal_many(P, {{dealer, secret}})[0];
}

// ---------------- reconstruction ----------------

std::vector<uint64_t> reveal_many(Party& P, const std::vector<Secret>& ss) {
  std::vector<uint64_t> pack;
  for (auto& s : ss) pack.push_back(s.piece);
  P.ctx.broadcast(std::move(pack));
  auto inbox = P.ctx.round();
  std::vector<uint64_t> out(ss.size(), 0);
  for (size_t k = 0; k < ss.size(); ++k) {
    std::vector<std::pair<uint64_t, uint64_t>> pts;
    for (int i = 1; i <= P.n; ++i) {
      if (!P.alive(i)) continue;
      auto data = payload(inbox, i, Channel::Broadcast);
      if (data && k < data->size()) pts.push_back({P.alpha(i), (*data)[k]});
    }
    auto v = robust_decode(P, pts, P.t);
    if (!v) throw std::runtime_error("reconstruction failed");
    out[k] = *v;
  }
  return out;
}

uint64_t reveal(Party& P, const Secret& s) { return reveal_many(P, {s})[0]; }

std::vector<std::optional<uint64_t>> reveal_to_many(Party& P, const std::vector<Secret>& ss,
                                                    int who) {
  std::vector<uint64_t> pack;
  for (auto& s : ss) pack.push_back(s.piece);
  P.ctx.send(who, std::move(pack));
  auto inbox = P.ctx.round();
  std::vector<std::optional<uint64_t>> out(ss.size());
  if (P.ctx.id != who) return out;
  for (size_t k = 0; k < ss.size(); ++k) {
    std::vector<std::pair<uint64_t, uint64_t>> pts;
    for (int i = 1; i <= P.n; ++i) {
      if (!P.alive(i)) continue;
      auto data = payload(inbox, i);
      if (data && k < data->size()) pts.push_back({P.alpha(i), (*data)[k]});
    }
    out[k] = robust_decode(P, pts, P.t);
  }
  return out;
}

std::optional<uint64_t> reveal_to(Party& P, const Secret& s, int who) {
  return reveal_to_many(P, {s}, who)[0];
}

Secret linear_combine(Party& P, const std::vector<std::pair<uint64_t, Secret>>& terms, uint64_t c0) {
  Secret out;
  out.piece = c0;  // a public constant is the constant polynomial: same piece everywhere
  for (auto& [c, s] : terms) {
    out.piece = P.f.add(out.piece, P.f.mul(c, s.piece));
    out.ok = out.ok && s.ok;
  }
  return out;
}

std::vector<Secret> truncate_many(Party& P, const std::vector<uint64_t>& h_pieces) {
  const Field& f = P.f;
  const int n = P.n, t = P.t;
  const size_t m = h_pieces.size();

  // randomizer u*r(u): every player contributes a random degree-t r_k and
  // hands each player its point.
  std::vector<std::vector<Poly>> rk(m);
  for (size_t k = 0; k < m; ++k) {
    std::vector<uint64_t> cs(t + 1);
    for (auto& c : cs) c = P.ctx.rng.fe(f);
    rk[k].push_back(Poly(f, cs));
  }
  for (int i = 1; i <= n; ++i) {
    std::vector<uint64_t> pack;
    for (size_t k = 0; k < m; ++k) pack.push_back(rk[k][0].eval(P.alpha(i)));
    P.ctx.send(i, std::move(pack));
  }
  auto inbox = P.ctx.round();
  std::vector<uint64_t> gamma(m);
  for (size_t k = 0; k < m; ++k) {
    uint64_t r_at_me = 0;
    for (int i = 1; i <= n; ++i) {
      auto data = payload(inbox, i);
      if (data && k < data->size()) r_at_me = f.add(r_at_me, (*data)[k]);
    }
    gamma[k] = f.add(h_pieces[k], f.mul(P.alpha(P.ctx.id), r_at_me));
  }

  // share the masked points: for item k, dealers 1..n in order
  std::vector<std::pair<int, uint64_t>> all;
  for (size_t k = 0; k < m; ++k)
    for (int i = 1; i <= n; ++i) all.push_back({i, i == P.ctx.id ? gamma[k] : 0});
  auto subs = share_plain_many(P, all);  // subs[k*n + (i-1)] = my subshare of gamma_i(k)

  // combine with the truncated Lagrange coefficients toward each target j
  auto xs = node_set(P);
  for (int j = 1; j <= n; ++j) {
    std::vector<uint64_t> pack;
    for (size_t k = 0; k < m; ++k) {
      uint64_t acc = 0;
      for (int i = 1; i <= n; ++i) {
        uint64_t L = truncated_lagrange_coeff(P, size_t(i - 1), P.alpha(j));
        acc = f.add(acc, f.mul(L, subs[k * n + (i - 1)].piece));
      }
      pack.push_back(acc);
    }
    P.ctx.send(j, std::move(pack));
  }
  inbox = P.ctx.round();
  std::vector<Secret> out(m);
  for (size_t k = 0; k < m; ++k) {
    std::vector<std::pair<uint64_t, uint64_t>> pts;
    for (int i = 1; i <= n; ++i) {
      auto data = payload(inbox, i);
      if (data && k < data->size()) pts.push_back({P.alpha(i), (*data)[k]});
    }
    auto v = robust_decode(P, pts, t);
    if (!v) throw std::runtime_error("truncate reconstruction failed");
    out[k].piece = *v;
  }
  return out;
}

std::vector<Secret> multiply_many(Party& P, const std::vector<std::pair<Secret, Secret>>& pairs) {
  std::vector<uint64_t> h;
  for (auto& [a, b] : pairs) h.push_back(P.f.mul(a.piece, b.piece));
  auto out = truncate_many(P, h);
  for (size_t k = 0; k < pairs.size(); ++k)
    out[k].ok = out[k].ok && pairs[k].first.ok && pairs[k].second.ok;
  return out;
}

Secret multiply(Party& P, const Secret& a, const Secret& b) {
  return multiply_many(P, {{a, b}})[0];
}

ProveProduct prove_product(Party& P, int alice, uint64_t a, uint64_t b, uint64_t c_claim) {
  const Field& f = P.f;
  const int t = P.t, me = P.ctx.id;

  // Alice fixes the sharing polynomials herself: f_a, f_b random with the
  // right free terms, auxiliary h_k soaking up the top coefficients of
  // h = f_a*f_b, and the claimed product shared along H.
  // The VSS deals use bivariates whose p(0,v) restriction equals the chosen
  // univariate, which is what fixes piece_i = phi(alpha_i).
  std::vector<std::pair<int, uint64_t>> items;          // (dealer, secret) for vss
  std::vector<std::optional<Poly>> forced(2 + t + 1);   // alice's phi per item
  if (me == alice) {
    auto rand_poly = [&](uint64_t s0) {
      std::vector<uint64_t> cs(t + 1);
      cs[0] = s0;
      for (int j = 1; j <= t; ++j) cs[j] = P.ctx.rng.fe(f);
      return Poly(f, cs);
    };
    Poly fa = rand_poly(a), fb = rand_poly(b);
    Poly h = fa * fb;
    std::vector<std::vector<uint64_t>> r(t + 1, std::vector<uint64_t>(std::max(t, 1), 0));
    std::vector<Poly> hk(t + 1, Poly::zero(f));
    for (int k = t; k >= 1; --k) {
      std::vector<uint64_t> cs(t + 1, 0);
      for (int j = 0; j <= t - 1; ++j) { cs[j] = P.ctx.rng.fe(f); r[k][j] = cs[j]; }
      uint64_t top = h.coeff(size_t(t + k));
      for (int mm = k + 1; mm <= t; ++mm) top = f.sub(top, r[mm][t + k - mm]);
      cs[t] = top;
      hk[k] = Poly(f, cs);
    }
    Poly H = h;
    for (int k = 1; k <= t; ++k) {
      std::vector<uint64_t> shift(k, 0);
      shift.insert(shift.end(), hk[k].coeffs().begin(), hk[k].coeffs().end());
      H = H - Poly(f, shift);
    }
    // an honest H has degree <= t and free term a*b; a cheating alice still
    // must present some degree-t polynomial with free term c_claim
    Poly phi_c = H;
    if (c_claim != f.mul(a, b)) {
      std::vector<uint64_t> cs(H.coeffs());
      cs.resize(std::max<size_t>(cs.size(), 1));
      cs[0] = f.add(cs[0], f.sub(c_claim, f.mul(a, b)));
      cs.resize(t + 1);
      phi_c = Poly(f, cs);
    }
    forced[0] = fa;
    forced[1] = fb;
    for (int k = 1; k <= t; ++k) forced[1 + k] = hk[k];
    forced[1 + t + 1] = phi_c;
  }
  // items: a, b, h_1..h_t, c — all dealt by alice with forced restrictions.
  // Reuse vss_deal_many but smuggle the forced polynomial through the
  // dealer's bivariate: we re-implement the deal by running vss on secrets
  // and then checking the product relation on the resulting pieces, with
  // alice sending her forced evaluation row first.
  size_t m = 2 + size_t(t) + 1;
  std::vector<std::pair<int, uint64_t>> deals(m, {alice, 0});
  auto got = vss_deal_impl(P, deals, &forced);

  ProveProduct out;
  out.a = got[0];
  out.b = got[1];
  out.c = got[m - 1];
  bool deals_ok = true;
  for (auto& s : got) deals_ok = deals_ok && s.ok;

  // product-relation check on own pieces, then complaint vote
  uint64_t expect = f.mul(got[0].piece, got[1].piece);
  uint64_t am = P.alpha(me), pw = am;
  for (int k = 1; k <= t; ++k) {
    expect = f.sub(expect, f.mul(pw, got[1 + k].piece));
    pw = f.mul(pw, am);
  }
  uint64_t complain = (deals_ok && got[m - 1].piece == expect) ? 0 : 1;
  if (me == alice) complain = 0;
  P.ctx.broadcast({complain});
  auto inbox = P.ctx.round();
  int cnt = 0;
  for (int i = 1; i <= P.n; ++i) {
    auto data = payload(inbox, i, Channel::Broadcast);
    if (data && !data->empty() && (*data)[0]) ++cnt;
  }
  out.accepted = deals_ok && cnt <= t;
  if (!out.accepted) P.disq.insert(alice);
  return out;
}

std::vector<Secret> rand_secret_many(Party& P, int count) {
  std::vector<std::pair<int, uint64_t>> deals;
  std::vector<int> dealers;
  for (int i = 1; i <= P.n; ++i)
    if (P.alive(i)) dealers.push_back(i);
  for (int c = 0; c < count; ++c)
    for (int d : dealers) deals.push_back({d, d == P.ctx.id ? P.ctx.rng.fe(P.f) : 0});
  auto got = vss_deal_many(P, deals);
  std::vector<Secret> out(count);
  for (int c = 0; c < count; ++c) {
    uint64_t acc = 0;
    for (size_t j = 0; j < dealers.size(); ++j) {
      auto& s = got[c * dealers.size() + j];
      if (s.ok) acc = P.f.add(acc, s.piece);
    }
    out[c].piece = acc;
  }
  return out;
}

Secret rand_secret(Party& P) { return rand_secret_many(P, 1)[0]; }

Secret rand_bit(Party& P) {
  const Field& f = P.f;
  std::vector<std::pair<int, uint64_t>> deals;
  std::vector<int> dealers;
  for (int i = 1; i <= P.n; ++i)
    if (P.alive(i)) dealers.push_back(i);
  for (int d : dealers) deals.push_back({d, d == P.ctx.id ? P.ctx.rng.below(2) : 0});
  auto bits = vss_deal_many(P, deals);
  // validate every contribution: b(b-1) must reveal to 0
  std::vector<std::pair<Secret, Secret>> pairs;
  for (auto& b : bits) {
    Secret bm1 = linear_combine(P, {{1, b}}, f.neg(1));
    pairs.push_back({b, bm1});
  }
  auto checks = multiply_many(P, pairs);
  auto vals = reveal_many(P, checks);
  std::vector<Secret> good;
  for (size_t i = 0; i < bits.size(); ++i)
    if (bits[i].ok && vals[i] == 0) good.push_back(bits[i]);
  if (good.empty()) return Secret{0, false};
  if (f.characteristic() == 2) {
    Secret acc = good[0];
    for (size_t i = 1; i < good.size(); ++i) acc = linear_combine(P, {{1, acc}, {1, good[i]}}, 0);
    return acc;
  }
  // odd characteristic: fold with x xor y = x + y - 2xy
  Secret acc = good[0];
  for (size_t i = 1; i < good.size(); ++i) {
    Secret prod = multiply(P, acc, good[i]);
    acc = linear_combine(P, {{1, acc}, {1, good[i]}, {f.neg(2 % f.order()), prod}}, 0);
  }
  return acc;
}

// ---------------- circuits ----------------

Circuit Circuit::parse(const std::string& text) {
  Circuit c;
  std::istringstream is(text);
  std::string line;
  auto ref = [](const std::string& s) {
    auto p = s.find(':');
    if (p == std::string::npos) throw std::invalid_argument("bad gate ref: " + s);
    return std::pair<int, int>{std::stoi(s.substr(0, p)), std::stoi(s.substr(p + 1))};
  };
  while (std::getline(is, line)) {
    auto h = line.find('#');
    if (h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "out") {
      int L, I;
      ls >> L >> I;
      c.outs.push_back({L, I});
      continue;
    }
    if (word != "gate") throw std::invalid_argument("bad line: " + line);
    int L, I;
    std::string kind;
    ls >> L >> I >> kind;
    if (int(c.layers.size()) <= L) c.layers.resize(L + 1);
    if (int(c.layers[L].size()) <= I) c.layers[L].resize(I + 1);
    Gate& g = c.layers[L][I];
    if (kind == "input") {
      if (L != 0) throw std::invalid_argument("inputs only at layer 0");
      g.kind = Gate::Kind::Input;
      ls >> g.input_player;
    } else if (kind == "linear") {
      if (L % 2 != 0 || L == 0) throw std::invalid_argument("linear gates on even layers > 0");
      g.kind = Gate::Kind::Linear;
      uint64_t c0;
      ls >> c0;
      g.consts.push_back(c0);
      uint64_t ck;
      std::string r;
      while (ls >> ck >> r) {
        g.consts.push_back(ck);
        auto [rl, ri] = ref(r);
        if (rl >= L) throw std::invalid_argument("forward reference");
        g.ins.push_back({rl, ri});
      }
    } else if (kind == "mul") {
      if (L % 2 != 1) throw std::invalid_argument("mul gates on odd layers");
      g.kind = Gate::Kind::Mul;
      std::string r1, r2;
      ls >> r1 >> r2;
      auto a = ref(r1), b = ref(r2);
      if (a.first >= L || b.first >= L) throw std::invalid_argument("forward reference");
      g.ins = {a, b};
    } else {
      throw std::invalid_argument("unknown gate kind: " + kind);
    }
  }
  return c;
}

std::string Circuit::print() const {
  std::ostringstream os;
  for (size_t L = 0; L < layers.size(); ++L)
    for (size_t I = 0; I < layers[L].size(); ++I) {
      const Gate& g = layers[L][I];
      os << "gate " << L << " " << I << " ";
      if (g.kind == Gate::Kind::Input) {
        os << "input " << g.input_player;
      } else if (g.kind == Gate::Kind::Linear) {
        os << "linear " << g.consts[0];
        for (size_t k = 0; k + 1 < g.consts.size(); ++k)
          os << " " << g.consts[k + 1] << " " << g.ins[k].first << ":" << g.ins[k].second;
      } else {
        os << "mul " << g.ins[0].first << ":" << g.ins[0].second << " " << g.ins[1].first << ":"
           << g.ins[1].second;
      }
      os << "\n";
    }
  for (auto& [L, I] : outs) os << "out " << L << " " << I << "\n";
  return os.str();
}

std::vector<uint64_t> Circuit::eval_plain(const Field& f,
                                          const std::map<int, std::vector<uint64_t>>& inputs) const {
  std::vector<std::vector<uint64_t>> val(layers.size());
  std::map<int, size_t> cursor;
  for (size_t L = 0; L < layers.size(); ++L) {
    val[L].resize(layers[L].size(), 0);
    for (size_t I = 0; I < layers[L].size(); ++I) {
      const Gate& g = layers[L][I];
      switch (g.kind) {
        case Gate::Kind::Input: {
          auto it = inputs.find(g.input_player);
          uint64_t v = 0;
          if (it != inputs.end()) {
            size_t c = cursor[g.input_player]++;
            if (c < it->second.size()) v = it->second[c];
          }
          val[L][I] = v;
          break;
        }
        case Gate::Kind::Linear: {
          uint64_t acc = g.consts[0];
          for (size_t k = 0; k < g.ins.size(); ++k)
            acc = f.add(acc, f.mul(g.consts[k + 1], val[g.ins[k].first][g.ins[k].second]));
          val[L][I] = acc;
          break;
        }
        case Gate::Kind::Mul:
          val[L][I] = f.mul(val[g.ins[0].first][g.ins[0].second], val[g.ins[1].first][g.ins[1].second]);
          break;
      }
    }
  }
  std::vector<uint64_t> out;
  for (auto& [L, I] : outs) out.push_back(val[L][I]);
  return out;
}

std::vector<uint64_t> eval_circuit(Party& P, const Circuit& C, const std::vector<uint64_t>& my_inputs) {
  // inputs: one VSS deal per input gate; disqualified owners contribute the
  // public constant 0
  std::vector<std::pair<int, uint64_t>> deals;
  std::vector<size_t> gate_of_deal;
  size_t cursor = 0;
  const auto& in_layer = C.layers.at(0);
  for (size_t I = 0; I < in_layer.size(); ++I) {
    const Gate& g = in_layer[I];
    if (g.kind != Gate::Kind::Input) throw std::invalid_argument("layer 0 must be inputs");
    if (!P.alive(g.input_player)) continue;
    uint64_t v = 0;
    if (g.input_player == P.ctx.id && cursor < my_inputs.size()) v = my_inputs[cursor++];
    deals.push_back({g.input_player, v});
    gate_of_deal.push_back(I);
  }
  auto shared = vss_deal_many(P, deals);

  std::vector<std::vector<Secret>> val(C.layers.size());
  val[0].resize(in_layer.size());
  for (size_t d = 0; d < deals.size(); ++d) {
    Secret s = shared[d];
    if (!s.ok) s = Secret{0, true};  // rejected dealer: default input 0
    val[0][gate_of_deal[d]] = s;
  }

  for (size_t L = 1; L < C.layers.size(); ++L) {
    val[L].resize(C.layers[L].size());
    std::vector<std::pair<Secret, Secret>> mults;
    std::vector<size_t> mult_gates;
    for (size_t I = 0; I < C.layers[L].size(); ++I) {
      const Gate& g = C.layers[L][I];
      if (g.kind == Gate::Kind::Linear) {
        std::vector<std::pair<uint64_t, Secret>> terms;
        for (size_t k = 0; k < g.ins.size(); ++k)
          terms.push_back({g.consts[k + 1], val[g.ins[k].first][g.ins[k].second]});
        val[L][I] = linear_combine(P, terms, g.consts[0]);
      } else if (g.kind == Gate::Kind::Mul) {
        mults.push_back({val[g.ins[0].first][g.ins[0].second], val[g.ins[1].first][g.ins[1].second]});
        mult_gates.push_back(I);
      } else {
        throw std::invalid_argument("input gate above layer 0");
      }
    }
    if (!mults.empty()) {
      auto prods = multiply_many(P, mults);
      for (size_t k = 0; k < mult_gates.size(); ++k) val[L][mult_gates[k]] = prods[k];
    }
  }

  std::vector<Secret> outs;
  for (auto& [L, I] : C.outs) outs.push_back(val[L][I]);
  return reveal_many(P, outs);
}

}  // namespace mpcw::third
