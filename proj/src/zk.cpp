#include "mpcw/zk.h"

#include <stdexcept>

#include "mpcw/lrr.h"

namespace mpcw::zk {

using third::Circuit;
using third::Gate;
using third::Party;
using third::Secret;

// Prover-side plain evaluation with inputs bound positionally to the
// layer-0 gates.
static std::vector<std::vector<uint64_t>> plain_gates(const Field& f, const Circuit& c,
                                                      const std::vector<uint64_t>& v) {
  std::vector<std::vector<uint64_t>> val(c.layers.size());
  size_t cursor = 0;
  for (size_t L = 0; L < c.layers.size(); ++L) {
    val[L].resize(c.layers[L].size(), 0);
    for (size_t I = 0; I < c.layers[L].size(); ++I) {
      const Gate& g = c.layers[L][I];
      switch (g.kind) {
        case Gate::Kind::Input:
          val[L][I] = cursor < v.size() ? v[cursor++] : 0;
          break;
        case Gate::Kind::Linear: {
          uint64_t acc = g.consts.empty() ? 0 : g.consts[0];
          for (size_t k = 0; k < g.ins.size(); ++k)
            acc = f.add(acc, f.mul(g.consts[k + 1], val[g.ins[k].first][g.ins[k].second]));
          val[L][I] = acc;
          break;
        }
        case Gate::Kind::Mul:
          val[L][I] = f.mul(val[g.ins[0].first][g.ins[0].second],
                            val[g.ins[1].first][g.ins[1].second]);
          break;
      }
    }
  }
  return val;
}

ProveOutcome prove_secret_predicate(Party& P, int prover, int verifier, const Circuit& c,
                                    const std::vector<Secret>& v_handles,
                                    const Secret& w_handle,
                                    const std::vector<uint64_t>& prover_v, int cheat_gate) {
  const Field& f = P.f;
  if (c.outs.size() != 1) throw std::invalid_argument("predicate circuit needs one output");

  // Flat order of gates: (layer, index) row-major.
  std::vector<std::pair<int, int>> flat;
  std::map<std::pair<int, int>, size_t> slot;
  for (size_t L = 0; L < c.layers.size(); ++L)
    for (size_t I = 0; I < c.layers[L].size(); ++I) {
      slot[{int(L), int(I)}] = flat.size();
      flat.push_back({int(L), int(I)});
    }

  // The prover deals its claimed value for every gate in one batch.
  std::vector<std::pair<int, uint64_t>> deals(flat.size(), {prover, 0});
  if (P.ctx.id == prover) {
    auto vals = plain_gates(f, c, prover_v);
    for (size_t g = 0; g < flat.size(); ++g) deals[g].second = vals[flat[g].first][flat[g].second];
    if (cheat_gate >= 0 && cheat_gate < int(flat.size()))
      deals[cheat_gate].second = f.add(deals[cheat_gate].second, 1);
  }
  auto claimed = third::vss_deal_many(P, deals);
  bool deal_ok = true;
  for (auto& s : claimed) deal_ok = deal_ok && s.ok;

  // One check per gate plus the output binding; all product checks share a
  // single multiply layer, so the proof's round count is depth-independent.
  std::vector<Secret> us(flat.size() + 1);
  std::vector<std::pair<Secret, Secret>> mults;
  std::vector<size_t> mult_slot;
  size_t cursor = 0;
  for (size_t g = 0; g < flat.size(); ++g) {
    auto [L, I] = flat[g];
    const Gate& gate = c.layers[L][I];
    switch (gate.kind) {
      case Gate::Kind::Input: {
        Secret bound = cursor < v_handles.size() ? v_handles[cursor] : Secret{0, true};
        ++cursor;
        us[g] = third::linear_combine(P, {{1, claimed[g]}, {f.sub(0, 1), bound}}, 0);
        break;
      }
      case Gate::Kind::Linear: {
        std::vector<std::pair<uint64_t, Secret>> terms{{1, claimed[g]}};
        for (size_t k = 0; k < gate.ins.size(); ++k)
          terms.push_back({f.sub(0, gate.consts[k + 1]), claimed[slot.at(gate.ins[k])]});
        us[g] = third::linear_combine(P, terms, f.sub(0, gate.consts.empty() ? 0 : gate.consts[0]));
        break;
      }
      case Gate::Kind::Mul:
        mults.push_back({claimed[slot.at(gate.ins[0])], claimed[slot.at(gate.ins[1])]});
        mult_slot.push_back(g);
        break;
    }
  }
  us.back() =
      third::linear_combine(P, {{1, claimed[slot.at(c.outs[0])]}, {f.sub(0, 1), w_handle}}, 0);

  if (mults.empty()) mults.push_back({Secret{0, true}, Secret{0, true}});  // keep round shape
  auto prods = third::multiply_many(P, mults);
  for (size_t k = 0; k < mult_slot.size(); ++k) {
    size_t g = mult_slot[k];
    us[g] = third::linear_combine(P, {{1, claimed[g]}, {f.sub(0, 1), prods[k]}}, 0);
  }

  ProveOutcome out;
  if (verifier == 0) {
    out.u = third::reveal_many(P, us);
  } else {
    auto got = third::reveal_to_many(P, us, verifier);
    if (P.ctx.id != verifier) return out;
    for (auto& o : got) {
      if (!o) return out;  // undecodable: reject
      out.u.push_back(*o);
    }
  }
  out.accepted = deal_ok;
  for (uint64_t u : out.u) out.accepted = out.accepted && u == 0;
  return out;
}

// ---------------- envelopes ----------------

int EnvelopeBox::commit(std::vector<uint64_t> s) {
  envs_.push_back({std::move(s), false, false});
  return int(envs_.size()) - 1;
}

std::optional<std::vector<uint64_t>> EnvelopeBox::open(int id, bool consent) {
  if (id < 0 || id >= int(envs_.size())) throw std::out_of_range("open before commit");
  Env& e = envs_[id];
  if (e.refused || !consent) {
    e.refused = true;
    return std::nullopt;
  }
  e.opened = true;
  return e.data;
}

bool EnvelopeBox::opened(int id) const {
  if (id < 0 || id >= int(envs_.size())) throw std::out_of_range("open before commit");
  return envs_[id].opened;
}

std::vector<half::Handle> envelope_commit_net(half::Party& P, int dealer,
                                              const std::vector<uint64_t>& vals) {
  std::vector<std::pair<int, uint64_t>> deals;
  for (uint64_t v : vals) deals.push_back({dealer, v});
  return half::vss_half_many(P, deals);
}

std::vector<std::optional<uint64_t>> envelope_open_net(half::Party& P,
                                                       const std::vector<half::Handle>& hs,
                                                       int dealer, bool consent) {
  // The dealer's say-so travels first; reliable players give up their pieces
  // only on an open instruction.
  if (P.ctx.id == dealer) P.ctx.broadcast({consent ? uint64_t(1) : uint64_t(0)});
  auto inbox = P.ctx.round();
  const Msg* word = Ctx::find(inbox, dealer, Channel::Broadcast);
  bool go = word && !word->data.empty() && word->data[0] == 1;
  std::vector<std::optional<uint64_t>> out(hs.size());
  if (!go) return out;
  auto vals = half::reveal_half_many(P, hs);
  for (size_t k = 0; k < hs.size(); ++k) out[k] = vals[k];
  return out;
}

// ---------------- notarized envelopes ----------------

NotarizeOutcome notarized_envelope(Ctx& ctx, const Field& f,
                                   const std::function<uint64_t(uint32_t)>& F, int nbits,
                                   uint32_t x, uint64_t y_claim, int K, bool cheat) {
  const int S = 1, R = 2;
  NotarizeOutcome out;
  out.y = y_claim;

  auto cf = cr::canonical_poly(f, F, nbits);
  lrr::LrrSpec spec(f, nbits, 1, std::max(cf.degree(), 1));
  const int m = spec.m;

  // Lagrange basis at 0 over nodes 1..m (how much one answer steers the
  // interpolated free term).
  std::vector<uint64_t> lag0(m);
  for (int j = 1; j <= m; ++j) {
    uint64_t num = 1, den = 1;
    for (int i = 1; i <= m; ++i) {
      if (i == j) continue;
      num = f.mul(num, f.sub(0, f.from_int(i)));
      den = f.mul(den, f.sub(f.from_int(j), f.from_int(i)));
    }
    lag0[j - 1] = f.div(num, den);
  }

  std::vector<uint64_t> xbits(nbits);
  for (int i = 0; i < nbits; ++i) xbits[i] = (x >> i) & 1;

  // Round 1: S seals its coin words and the stage-II input bits. Sealing is
  // by delivery order: the words are fixed in R's transcript before R has
  // said anything, but R acts on them only when S opens.
  if (ctx.id == S) {
    std::vector<uint64_t> msg;
    for (int k = 0; k < K; ++k) {
      out.r_hat.push_back(ctx.rng.next() % f.order());
      msg.push_back(out.r_hat.back());
    }
    for (int i = 0; i < nbits; ++i) msg.push_back(xbits[i]);
    ctx.send(R, std::move(msg));
  }
  auto in1 = ctx.round();
  std::vector<uint64_t> sealed1;
  if (ctx.id == R) sealed1 = Ctx::from(in1, S);

  // Round 2: R announces its half of the coins in the clear.
  if (ctx.id == R) {
    for (int k = 0; k < K; ++k) out.s_hat.push_back(ctx.rng.next() % f.order());
    ctx.broadcast(out.s_hat);
  }
  auto in2 = ctx.round();
  if (ctx.id == S) out.s_hat = Ctx::from(in2, R, Channel::Broadcast);

  if (ctx.id == S)
    for (int k = 0; k < K; ++k) out.r.push_back(out.r_hat[k] ^ out.s_hat[k]);

  // Round 3: S seals, per repetition, the m blinded queries of the joint
  // coins together with the claimed answers. A cheating S is still bound to
  // the true queries, but patches the one answer that makes the answer
  // curve pass through y_claim at zero.
  if (ctx.id == S) {
    std::vector<uint64_t> msg;
    for (int k = 0; k < K; ++k) {
      Rng rep(out.r[k]);
      auto qs = lrr::lrr_query(spec, xbits, rep);
      std::vector<uint64_t> zs(m);
      for (int i = 0; i < m; ++i) zs[i] = cf.eval(f, qs[i]);
      if (cheat) {
        uint64_t delta = f.sub(y_claim, lrr::lrr_interpolate(spec, zs));
        if (delta != 0) {
          int j = int(ctx.rng.next() % m);
          zs[j] = f.add(zs[j], f.div(delta, lag0[j]));
        }
      }
      for (int i = 0; i < m; ++i) {
        for (int v = 0; v < nbits; ++v) msg.push_back(qs[i][v]);
        msg.push_back(zs[i]);
      }
    }
    ctx.send(R, std::move(msg));
  }
  auto in3 = ctx.round();
  std::vector<uint64_t> sealed3;
  if (ctx.id == R) sealed3 = Ctx::from(in3, S);

  // Round 4: R challenges one index per repetition.
  std::vector<uint64_t> picks;
  if (ctx.id == R) {
    for (int k = 0; k < K; ++k) picks.push_back(ctx.rng.next() % m);
    ctx.broadcast(picks);
  }
  auto in4 = ctx.round();
  if (ctx.id == S) picks = Ctx::from(in4, R, Channel::Broadcast);

  // Round 5: S opens the challenged pairs, its coin words, and (stage II)
  // the input envelopes. R now reads the sealed words and checks each
  // opened pair against its own local evaluation of G = c_F.
  if (ctx.id == S) ctx.broadcast({1});
  auto in5 = ctx.round();
  bool accept = false;
  if (ctx.id == R) {
    const Msg* go = Ctx::find(in5, S, Channel::Broadcast);
    size_t per_rep = size_t(m) * (nbits + 1);
    accept = go && !go->data.empty() && go->data[0] == 1 &&
             sealed1.size() == size_t(K + nbits) && sealed3.size() == size_t(K) * per_rep &&
             picks.size() == size_t(K);
    if (accept) {
      for (int k = 0; k < K; ++k) {
        out.r_hat.push_back(sealed1[k]);
        out.r.push_back(out.r_hat[k] ^ out.s_hat[k]);
        size_t base = k * per_rep + picks[k] * (nbits + 1);
        std::vector<uint64_t> yvec(sealed3.begin() + base, sealed3.begin() + base + nbits);
        uint64_t z = sealed3[base + nbits];
        if (cf.eval(f, yvec) != z) accept = false;
      }
      for (int i = 0; i < nbits; ++i) out.x_opened.push_back(sealed1[K + i]);
    }
  }

  // Round 6: R's verdict.
  if (ctx.id == R) ctx.broadcast({accept ? uint64_t(1) : uint64_t(0)});
  auto in6 = ctx.round();
  if (ctx.id == S) {
    const Msg* v = Ctx::find(in6, R, Channel::Broadcast);
    accept = v && !v->data.empty() && v->data[0] == 1;
  }
  out.accept = accept;
  return out;
}

}  // namespace mpcw::zk
