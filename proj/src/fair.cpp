#include "mpcw/fair.h"

#include <map>
#include <stdexcept>

namespace mpcw::fair {

// ---------------- ideal two-party functions ----------------

TpeFunc make_mult_tpe(const Field& f) {
  return [fp = &f](const std::vector<uint64_t>& lo, const std::vector<uint64_t>& hi)
             -> std::pair<std::vector<uint64_t>, std::vector<uint64_t>> {
    const Field& f = *fp;
    size_t cnt = lo.at(0);
    if (hi.at(0) != cnt || lo.size() != 1 + 4 * cnt || hi.size() != 1 + 4 * cnt)
      throw std::logic_error("mult batch mismatch");
    std::vector<uint64_t> out_lo(2 * cnt), out_hi(2 * cnt);
    for (size_t i = 0; i < cnt; ++i) {
      uint64_t a1 = lo[1 + 4 * i], b1 = lo[2 + 4 * i], r1 = lo[3 + 4 * i], s1 = lo[4 + 4 * i];
      uint64_t a2 = hi[1 + 4 * i], b2 = hi[2 + 4 * i], r2 = hi[3 + 4 * i], s2 = hi[4 + 4 * i];
      // directed (lo, hi): alpha = a1*b2 + r1 + s2 to lo, beta = -(r1+s2) to hi
      out_lo[2 * i] = f.add(f.mul(a1, b2), f.add(r1, s2));
      out_hi[2 * i + 1] = f.sub(0, f.add(r1, s2));
      // directed (hi, lo): alpha to hi, beta to lo
      out_hi[2 * i] = f.add(f.mul(a2, b1), f.add(r2, s1));
      out_lo[2 * i + 1] = f.sub(0, f.add(r2, s1));
    }
    return {out_lo, out_hi};
  };
}

TpeFunc make_coin_tpe() {
  return [](const std::vector<uint64_t>& lo, const std::vector<uint64_t>& hi)
             -> std::pair<std::vector<uint64_t>, std::vector<uint64_t>> {
    if (lo.at(2) != hi.at(2) || lo.at(3) != hi.at(3))
      throw std::logic_error("coin parameter mismatch");
    uint64_t F = (lo.at(0) ^ hi.at(0)) & 1;
    uint64_t k = lo.at(2);
    int count = int(lo.at(3));
    Rng rng(lo.at(1) ^ hi.at(1) ^ 0x5bd1e995);
    std::vector<uint64_t> out_lo(count), out_hi(count);
    for (int j = 0; j < count; ++j) {
      uint64_t c = rng.below(2 * k) < k + 2 ? 0 : 1;  // bias(1/k): 0 w.p. 1/2 + 1/k
      uint64_t m = rng.bit();
      out_lo[j] = m;
      out_hi[j] = (F ^ c) ^ m;
    }
    return {out_lo, out_hi};
  };
}

// ---------------- sum sharing ----------------

std::optional<uint64_t> share_su(Party& P, int dealer, uint64_t value) {
  const Field& f = P.f;
  uint64_t own = 0;
  if (P.ctx.id == dealer) {
    uint64_t acc = 0;
    for (int j = 1; j <= P.n; ++j) {
      if (j == dealer) continue;
      uint64_t r = P.ctx.rng.fe(f);
      acc = f.add(acc, r);
      P.ctx.send(j, {r});
    }
    own = f.sub(value, acc);
  }
  auto inbox = P.ctx.round();
  if (P.ctx.id == dealer) return own;
  const Msg* m = Ctx::find(inbox, dealer);
  if (!m || m->data.empty()) return std::nullopt;  // dealer halted: Cheating
  return m->data[0];
}

std::optional<uint64_t> reveal_su(Party& P, uint64_t piece) {
  P.ctx.broadcast({piece});
  auto inbox = P.ctx.round();
  uint64_t acc = 0;
  for (int j = 1; j <= P.n; ++j) {
    const Msg* m = Ctx::find(inbox, j, Channel::Broadcast);
    if (!m || m->data.empty()) return std::nullopt;
    acc = P.f.add(acc, m->data[0]);
  }
  return acc;
}

std::optional<std::vector<uint64_t>> mult_su_many(
    Party& P, const std::vector<std::pair<uint64_t, uint64_t>>& pairs) {
  const Field& f = P.f;
  const size_t cnt = pairs.size();
  for (int j = 1; j <= P.n; ++j) {
    if (j == P.ctx.id) continue;
    std::vector<uint64_t> post{cnt};
    for (auto& [a, b] : pairs) {
      post.push_back(a);
      post.push_back(b);
      post.push_back(P.ctx.rng.fe(f));  // r: pads the alpha I receive
      post.push_back(P.ctx.rng.fe(f));  // s: pads the alpha my peer receives
    }
    P.ctx.tpe_post(j, kTpeMult, std::move(post));
  }
  auto inbox = P.ctx.round();
  std::vector<uint64_t> out(cnt);
  for (size_t i = 0; i < cnt; ++i) out[i] = f.mul(pairs[i].first, pairs[i].second);
  for (int j = 1; j <= P.n; ++j) {
    if (j == P.ctx.id) continue;
    const Msg* m = Ctx::find(inbox, j, Channel::TPEResult);
    if (!m || m->data.size() != 2 * cnt) return std::nullopt;  // peer halted
    for (size_t i = 0; i < cnt; ++i)
      out[i] = f.add(out[i], f.add(m->data[2 * i], m->data[2 * i + 1]));
  }
  return out;
}

std::optional<uint64_t> mult_su(Party& P, uint64_t a_piece, uint64_t b_piece) {
  auto r = mult_su_many(P, {{a_piece, b_piece}});
  if (!r) return std::nullopt;
  return (*r)[0];
}

std::optional<std::vector<uint64_t>> eval_semi(Party& P, const third::Circuit& c,
                                               const std::vector<uint64_t>& my_inputs) {
  const Field& f = P.f;
  const auto& in_layer = c.layers.at(0);
  std::map<int, std::vector<size_t>> owned;
  for (size_t I = 0; I < in_layer.size(); ++I) {
    if (in_layer[I].kind != third::Gate::Kind::Input)
      throw std::invalid_argument("layer 0 must be inputs");
    owned[in_layer[I].input_player].push_back(I);
  }

  // inputs: every owner sum-shares its gate values, one packed message per
  // recipient
  std::vector<std::vector<uint64_t>> val(c.layers.size());
  val[0].resize(in_layer.size(), 0);
  if (owned.count(P.ctx.id)) {
    std::vector<std::vector<uint64_t>> per(P.n + 1);
    size_t cursor = 0;
    for (size_t I : owned[P.ctx.id]) {
      uint64_t v = cursor < my_inputs.size() ? my_inputs[cursor++] : 0;
      uint64_t acc = 0;
      for (int j = 1; j <= P.n; ++j) {
        if (j == P.ctx.id) continue;
        uint64_t r = P.ctx.rng.fe(f);
        acc = f.add(acc, r);
        per[j].push_back(r);
      }
      val[0][I] = f.sub(v, acc);
    }
    for (int j = 1; j <= P.n; ++j)
      if (j != P.ctx.id) P.ctx.send(j, per[j]);
  }
  auto inbox = P.ctx.round();
  for (auto& [owner, gates] : owned) {
    if (owner == P.ctx.id) continue;
    const Msg* m = Ctx::find(inbox, owner);
    if (!m || m->data.size() < gates.size()) return std::nullopt;  // owner halted
    for (size_t idx = 0; idx < gates.size(); ++idx) val[0][gates[idx]] = m->data[idx];
  }

  for (size_t L = 1; L < c.layers.size(); ++L) {
    val[L].resize(c.layers[L].size(), 0);
    std::vector<std::pair<uint64_t, uint64_t>> mults;
    std::vector<size_t> mult_gates;
    for (size_t I = 0; I < c.layers[L].size(); ++I) {
      const third::Gate& g = c.layers[L][I];
      if (g.kind == third::Gate::Kind::Linear) {
        // constants live on player 1's piece only
        uint64_t acc = P.ctx.id == 1 && !g.consts.empty() ? g.consts[0] : 0;
        for (size_t k = 0; k < g.ins.size(); ++k)
          acc = f.add(acc, f.mul(g.consts[k + 1], val[g.ins[k].first][g.ins[k].second]));
        val[L][I] = acc;
      } else if (g.kind == third::Gate::Kind::Mul) {
        mults.push_back({val[g.ins[0].first][g.ins[0].second],
                         val[g.ins[1].first][g.ins[1].second]});
        mult_gates.push_back(I);
      } else {
        throw std::invalid_argument("input gate above layer 0");
      }
    }
    if (!mults.empty()) {
      auto prods = mult_su_many(P, mults);
      if (!prods) return std::nullopt;
      for (size_t k = 0; k < mult_gates.size(); ++k) val[L][mult_gates[k]] = (*prods)[k];
    }
  }

  std::vector<uint64_t> pieces;
  for (auto& [L, I] : c.outs) pieces.push_back(val[L][I]);
  P.ctx.broadcast(pieces);
  auto fin = P.ctx.round();
  std::vector<uint64_t> outs(c.outs.size(), 0);
  for (int j = 1; j <= P.n; ++j) {
    const Msg* m = Ctx::find(fin, j, Channel::Broadcast);
    if (!m || m->data.size() != c.outs.size()) return std::nullopt;
    for (size_t k = 0; k < outs.size(); ++k) outs[k] = f.add(outs[k], m->data[k]);
  }
  return outs;
}

// ---------------- gradual disclosure ----------------

void OddsLedger::observe(int d, int k) {
  double hit = 0.5 + 1.0 / k, miss = 0.5 - 1.0 / k;
  double num = (d == 1 ? hit : miss) * p1;
  double den = (d == 0 ? hit : miss) * (1 - p1);
  p1 = num / (num + den);
  odds_hist.push_back(odds(p1));
}

DiscloseResult fair_disclose(Party& P, uint64_t my_f_share, int k, int halter, int halt_after) {
  DiscloseResult res;
  const int peer = P.ctx.id == 1 ? 2 : 1;
  const int count = k * k * k + 1;
  // the coins are computed and masked with F in one stroke; disclosure is
  // then nothing but reveals
  P.ctx.tpe_post(peer, kTpeCoins, {my_f_share & 1, P.ctx.rng.next(), uint64_t(k),
                                   uint64_t(count)});
  auto in0 = P.ctx.round();
  const Msg* setup = Ctx::find(in0, peer, Channel::TPEResult);
  if (!setup || setup->data.size() != size_t(count)) return res;
  std::vector<uint64_t> mine = setup->data;

  int ones = 0, seen = 0;
  bool quiet = false, guessed = false;
  for (int j = 0; j < count; ++j) {
    bool send = !quiet && !(P.ctx.id == halter && halt_after > 0 && j >= halt_after);
    if (send) P.ctx.broadcast({mine[j]});
    auto in = P.ctx.round();
    const Msg* mj = Ctx::find(in, peer, Channel::Broadcast);
    bool peer_there = mj && !mj->data.empty();
    if (send && peer_there) {
      ones += int((mine[j] ^ mj->data[0]) & 1);
      ++seen;
      continue;
    }
    // one side (or both) has gone silent: fix the guess, answer silence
    // with silence, and stop once the wire is quiet both ways
    if (!guessed) {
      res.guess = 2 * ones > seen ? 1 : 0;
      res.rounds_seen = seen;
      guessed = true;
    }
    if (!send && !peer_there) break;
    quiet = !send;  // a walker-away stays away; a detector goes quiet next round
    if (peer_there == false && send) quiet = true;
  }
  if (!guessed) {
    res.guess = 2 * ones > seen ? 1 : 0;
    res.rounds_seen = seen;
    res.completed = true;
    res.f_value = res.guess;
  }
  return res;
}

// ---------------- garbled gates ----------------

PrgOut prg_expand(uint64_t key, int k) {
  uint64_t mask = k >= 64 ? ~uint64_t(0) : (uint64_t(1) << k) - 1;
  PrgOut o;
  o.tag = Rng::derive(key, 0).next() & mask;
  o.mask0 = Rng::derive(key, 1).next() & mask;
  o.mask1 = Rng::derive(key, 2).next() & mask;
  return o;
}

YaoGate yao_gate_encode(const std::array<int, 4>& g, const WireKeys& X, const WireKeys& Y,
                        const WireKeys& Z, int wx, int wy, int wz, int k) {
  YaoGate gate;
  gate.k = k;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      PrgOut px = prg_expand(X.at(a), k), py = prg_expand(Y.at(b), k);
      int zclaim = g[(a ^ wx) * 2 + (b ^ wy)] ^ wz;
      gate.e[a * 2 + b] = {px.tag, py.tag, px.mask(b) ^ py.mask(a) ^ Z.at(zclaim)};
    }
  return gate;
}

std::optional<uint64_t> yao_gate_decode(const YaoGate& g, uint64_t X, uint64_t Y) {
  PrgOut px = prg_expand(X, g.k), py = prg_expand(Y, g.k);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const auto& e = g.e[a * 2 + b];
      if (e.tx == px.tag && e.ty == py.tag) return e.mz ^ px.mask(b) ^ py.mask(a);
    }
  return std::nullopt;
}

// ---------------- two-party circuits ----------------

int eval2_plain(const BoolCircuit& c, uint64_t x1, uint64_t x2) {
  std::vector<int> v(c.n1 + c.n2 + c.gates.size());
  for (int i = 0; i < c.n1; ++i) v[i] = int(x1 >> i & 1);
  for (int i = 0; i < c.n2; ++i) v[c.n1 + i] = int(x2 >> i & 1);
  for (size_t j = 0; j < c.gates.size(); ++j)
    v[c.n1 + c.n2 + j] = c.gates[j].g[v[c.gates[j].a] * 2 + v[c.gates[j].b]];
  return v[c.out];
}

std::optional<int> eval2(Ctx& ctx, const BoolCircuit& c, uint64_t my_bits, int k) {
  const int W = c.n1 + c.n2 + int(c.gates.size());
  const uint64_t mask = k >= 64 ? ~uint64_t(0) : (uint64_t(1) << k) - 1;

  if (ctx.id == 1) {
    std::vector<WireKeys> keys(W);
    std::vector<int> om(W);
    for (int w = 0; w < W; ++w) {
      keys[w].k0 = ctx.rng.next() & mask;
      do keys[w].k1 = ctx.rng.next() & mask;
      while (keys[w].k1 == keys[w].k0);
      om[w] = int(ctx.rng.bit());
    }
    // gate material, own input keys, output translation
    std::vector<uint64_t> msg;
    for (size_t j = 0; j < c.gates.size(); ++j) {
      const BoolGate& bg = c.gates[j];
      YaoGate yg = yao_gate_encode(bg.g, keys[bg.a], keys[bg.b], keys[c.n1 + c.n2 + int(j)],
                                   om[bg.a], om[bg.b], om[c.n1 + c.n2 + int(j)], k);
      for (auto& e : yg.e) {
        msg.push_back(e.tx);
        msg.push_back(e.ty);
        msg.push_back(e.mz);
      }
    }
    for (int i = 0; i < c.n1; ++i)
      msg.push_back(keys[i].at(int(my_bits >> i & 1) ^ om[i]));
    msg.push_back(keys[c.out].at(om[c.out]));      // the key that means 0
    msg.push_back(keys[c.out].at(1 ^ om[c.out]));  // the key that means 1
    ctx.send(2, std::move(msg));
    ctx.round();
    // player 2's input keys, one oblivious transfer per wire
    for (int i = 0; i < c.n2; ++i) {
      int w = c.n1 + i;
      ctx.ot12_send(2, {keys[w].at(om[w])}, {keys[w].at(1 ^ om[w])});
      ctx.round();
    }
    return std::nullopt;
  }

  if (ctx.id != 2) {  // bystanders only keep the round structure
    for (int r = 0; r < 1 + c.n2; ++r) ctx.round();
    return std::nullopt;
  }

  auto inbox = ctx.round();
  const Msg* m = Ctx::find(inbox, 1);
  if (!m || m->data.size() != c.gates.size() * 12 + size_t(c.n1) + 2) return std::nullopt;
  std::vector<uint64_t> keyval(W, 0);
  for (int i = 0; i < c.n1; ++i) keyval[i] = m->data[c.gates.size() * 12 + i];
  uint64_t means0 = m->data[m->data.size() - 2], means1 = m->data[m->data.size() - 1];
  for (int i = 0; i < c.n2; ++i) {
    ctx.ot12_choose(1, int(my_bits >> i & 1));
    auto in = ctx.round();
    const Msg* d = Ctx::find(in, 1, Channel::OT12Deliver);
    if (!d || d->data.empty()) return std::nullopt;
    keyval[c.n1 + i] = d->data[0];
  }
  for (size_t j = 0; j < c.gates.size(); ++j) {
    YaoGate yg;
    yg.k = k;
    for (int t = 0; t < 4; ++t)
      yg.e[t] = {m->data[j * 12 + t * 3], m->data[j * 12 + t * 3 + 1],
                 m->data[j * 12 + t * 3 + 2]};
    auto z = yao_gate_decode(yg, keyval[c.gates[j].a], keyval[c.gates[j].b]);
    if (!z) return std::nullopt;
    keyval[c.n1 + c.n2 + j] = *z;
  }
  if (keyval[c.out] == means0) return 0;
  if (keyval[c.out] == means1) return 1;
  return std::nullopt;
}

// ---------------- generalized gates ----------------

GenGate generalized_gate_encode(const std::array<int, 4>& g, const std::vector<WireKeys>& X,
                                const std::vector<WireKeys>& Y, const WireKeys& Z,
                                const std::vector<bool>& voided, int wx, int wy, int wz,
                                int k) {
  GenGate gate;
  gate.n = int(X.size());
  gate.k = k;
  gate.voided = voided;
  bool all_void = true;
  for (int i = 0; i < gate.n; ++i) all_void = all_void && voided[i];
  if (all_void) throw std::invalid_argument("every contributor voided");
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      GenGate::Entry e;
      e.tx.assign(gate.n, 0);
      e.ty.assign(gate.n, 0);
      e.mz = Z.at(g[(a ^ wx) * 2 + (b ^ wy)] ^ wz);
      for (int i = 0; i < gate.n; ++i) {
        if (voided[i]) continue;  // voided streams contribute zero words
        PrgOut px = prg_expand(X[i].at(a), k), py = prg_expand(Y[i].at(b), k);
        e.tx[i] = px.tag;
        e.ty[i] = py.tag;
        e.mz ^= px.mask(b) ^ py.mask(a);
      }
      gate.e[a * 2 + b] = e;
    }
  return gate;
}

std::optional<uint64_t> generalized_gate_decode(const GenGate& g,
                                                const std::vector<uint64_t>& X,
                                                const std::vector<uint64_t>& Y) {
  bool all_void = true;
  for (int i = 0; i < g.n; ++i) all_void = all_void && g.voided[i];
  if (all_void) throw std::invalid_argument("every contributor voided");
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const auto& e = g.e[a * 2 + b];
      bool match = true;
      uint64_t z = e.mz;
      for (int i = 0; i < g.n && match; ++i) {
        if (g.voided[i]) continue;
        PrgOut px = prg_expand(X[i], g.k), py = prg_expand(Y[i], g.k);
        match = e.tx[i] == px.tag && e.ty[i] == py.tag;
        z ^= px.mask(b) ^ py.mask(a);
      }
      if (match) return z;
    }
  return std::nullopt;
}

}  // namespace mpcw::fair
