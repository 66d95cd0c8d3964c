#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <map>

#include "mpcw/fair.h"

using namespace mpcw;

namespace {

SimOptions fair_opt(const Field& f, uint64_t seed) {
  SimOptions opt;
  opt.seed = seed;
  opt.tpe_registry[fair::kTpeMult] = fair::make_mult_tpe(f);
  opt.tpe_registry[fair::kTpeCoins] = fair::make_coin_tpe();
  return opt;
}

Execution run_fair(int n, const Field& f, const SimOptions& opt,
                   const std::function<void(fair::Party&)>& body) {
  return run_protocol(n, [&](Ctx& ctx) {
    fair::Party P(ctx, f);
    body(P);
  }, opt);
}

// x1 + x2*x3 as a layered circuit with three input owners.
const char* kSemiCircuit =
    "gate 0 0 input 1\n"
    "gate 0 1 input 2\n"
    "gate 0 2 input 3\n"
    "gate 1 0 mul 0:1 0:2\n"
    "gate 2 0 linear 0 1 0:0 1 1:0\n"
    "out 2 0\n";

}  // namespace

TEST_CASE("sum-share multiplication, exhaustive over a small field") {
  Field f(FieldSpec::prime(5));
  for (uint64_t x = 0; x < 5; ++x)
    for (uint64_t y = 0; y < 5; ++y) {
      auto opt = fair_opt(f, 100 + 5 * x + y);
      auto ex = run_fair(3, f, opt, [&](fair::Party& P) {
        auto xs = fair::share_su(P, 1, x);
        auto ys = fair::share_su(P, 2, y);
        REQUIRE(xs);
        REQUIRE(ys);
        auto ps = fair::mult_su(P, *xs, *ys);
        REQUIRE(ps);
        auto v = fair::reveal_su(P, *ps);
        REQUIRE(v);
        P.ctx.output({*v});
      });
      for (int i = 1; i <= 3; ++i) {
        if (ex.outputs[i][0] != f.mul(x, y))
          REQUIRE(ex.outputs[i][0] == f.mul(x, y));
      }
    }
}

TEST_CASE("batched multiplication and the zero annihilator") {
  Field f(FieldSpec::prime(5));
  auto opt = fair_opt(f, 7);
  auto ex = run_fair(2, f, opt, [&](fair::Party& P) {
    auto a = fair::share_su(P, 1, 2);
    auto b = fair::share_su(P, 2, 3);
    auto z = fair::share_su(P, 1, 0);
    auto prods = fair::mult_su_many(P, {{*a, *b}, {*z, *b}, {*a, *a}});
    REQUIRE(prods);
    std::vector<uint64_t> out;
    for (uint64_t p : *prods) out.push_back(*fair::reveal_su(P, p));
    P.ctx.output(out);
  });
  CHECK(ex.outputs[1] == std::vector<uint64_t>({1, 0, 4}));  // 6, 0, 4 mod 5
  CHECK(ex.outputs[2] == ex.outputs[1]);
}

TEST_CASE("cross-term words are individually uniform and sum correctly") {
  Field f(FieldSpec::prime(5));
  auto tpe = fair::make_mult_tpe(f);
  uint64_t a1 = 2, b1 = 4, a2 = 3, b2 = 1;
  std::map<uint64_t, int> alo_hist, blo_hist;
  for (uint64_t r1 = 0; r1 < 5; ++r1)
    for (uint64_t s1 = 0; s1 < 5; ++s1)
      for (uint64_t r2 = 0; r2 < 5; ++r2)
        for (uint64_t s2 = 0; s2 < 5; ++s2) {
          auto [lo, hi] = tpe({1, a1, b1, r1, s1}, {1, a2, b2, r2, s2});
          // each direction's two words reassemble the cross product
          REQUIRE(f.add(lo[0], hi[1]) == f.mul(a1, b2));
          REQUIRE(f.add(hi[0], lo[1]) == f.mul(a2, b1));
          ++alo_hist[lo[0]];
          ++blo_hist[lo[1]];
        }
  for (uint64_t v = 0; v < 5; ++v) {
    CHECK(alo_hist[v] == 125);  // uniform marginals over the pads
    CHECK(blo_hist[v] == 125);
  }
}

TEST_CASE("semi-honest circuit evaluation with three input owners") {
  Field f(FieldSpec::prime(5));
  auto c = third::Circuit::parse(kSemiCircuit);
  auto opt = fair_opt(f, 11);
  auto ex = run_fair(3, f, opt, [&](fair::Party& P) {
    std::vector<uint64_t> in;
    if (P.ctx.id == 1) in = {1};
    if (P.ctx.id == 2) in = {2};
    if (P.ctx.id == 3) in = {3};
    auto outs = fair::eval_semi(P, c, in);
    REQUIRE(outs);
    P.ctx.output(*outs);
  });
  for (int i = 1; i <= 3; ++i) CHECK(ex.outputs[i] == std::vector<uint64_t>({2}));  // 1+6 mod 5
}

TEST_CASE("a fail-stop halt turns into Cheating for every honest player") {
  Field f(FieldSpec::prime(5));
  auto c = third::Circuit::parse(kSemiCircuit);
  for (int halt : {0, 1, 2}) {  // input round, product round, output round
    auto opt = fair_opt(f, 13 + halt);
    opt.adversary.kind = Adversary::Kind::FailStop;
    opt.adversary.corrupt = {3};
    opt.adversary.halt_round = halt;
    auto ex = run_fair(3, f, opt, [&](fair::Party& P) {
      std::vector<uint64_t> in{uint64_t(P.ctx.id)};
      auto outs = fair::eval_semi(P, c, in);
      P.ctx.output({outs ? uint64_t(1) : uint64_t(0)});
    });
    CHECK(ex.outputs[1] == std::vector<uint64_t>({0}));
    CHECK(ex.outputs[2] == std::vector<uint64_t>({0}));
  }
}

TEST_CASE("a passively corrupt player leaves the trace untouched") {
  Field f(FieldSpec::prime(5));
  auto c = third::Circuit::parse(kSemiCircuit);
  auto body = [&](fair::Party& P) {
    std::vector<uint64_t> in{uint64_t(P.ctx.id)};
    auto outs = fair::eval_semi(P, c, in);
    P.ctx.output(outs ? *outs : std::vector<uint64_t>{});
  };
  auto opt_clean = fair_opt(f, 17);
  auto opt_passive = fair_opt(f, 17);
  opt_passive.adversary.kind = Adversary::Kind::Passive;
  opt_passive.adversary.corrupt = {2};
  auto ex1 = run_fair(3, f, opt_clean, body);
  auto ex2 = run_fair(3, f, opt_passive, body);
  CHECK(ex1.trace_text() == ex2.trace_text());
  CHECK(ex1.outputs == ex2.outputs);
}

TEST_CASE("odds ledger follows the biased-coin posterior") {
  fair::OddsLedger led;
  led.observe(1, 4);  // likelihood ratio L = (3/4)/(1/4) = 3
  CHECK(led.p1 == doctest::Approx(0.75));
  CHECK(led.odds_hist.back() == doctest::Approx(3.0));
  led.observe(0, 4);  // back to even
  CHECK(led.p1 == doctest::Approx(0.5));
  led.observe(1, 8);
  CHECK(led.p1 == doctest::Approx((0.625) / (0.625 + 0.375)));
}

TEST_CASE("gradual disclosure completes and both sides learn F") {
  Field f(FieldSpec::prime(5));
  for (uint64_t trial = 0; trial < 12; ++trial) {
    uint64_t s1 = trial & 1, s2 = (trial >> 1) & 1;
    auto opt = fair_opt(f, 900 + trial);
    auto ex = run_fair(2, f, opt, [&](fair::Party& P) {
      auto r = fair::fair_disclose(P, P.ctx.id == 1 ? s1 : s2, 4);
      P.ctx.output({uint64_t(r.guess), r.completed ? uint64_t(1) : 0, uint64_t(r.rounds_seen)});
    });
    for (int i = 1; i <= 2; ++i) {
      CHECK(ex.outputs[i][0] == (s1 ^ s2));
      CHECK(ex.outputs[i][1] == 1);
      CHECK(ex.outputs[i][2] == 65);  // k^3 + 1 coins at k = 4
    }
  }
}

TEST_CASE("walking away early leaves the stayer a one-coin majority") {
  Field f(FieldSpec::prime(5));
  // protocol-level shape: stayer sees exactly halt_after coins, both end
  for (int ha : {1, 5}) {
    auto opt = fair_opt(f, 40 + ha);
    auto ex = run_fair(2, f, opt, [&](fair::Party& P) {
      auto r = fair::fair_disclose(P, P.ctx.id == 1 ? 1 : 0, 4, 1, ha);
      P.ctx.output({uint64_t(r.guess), r.completed ? uint64_t(1) : 0, uint64_t(r.rounds_seen)});
    });
    for (int i = 1; i <= 2; ++i) {
      CHECK(ex.outputs[i][1] == 0);
      CHECK(ex.outputs[i][2] == uint64_t(ha));
    }
  }
  // statistics of a one-coin guess: correct with probability 1/2 + 1/k
  int k = 4, hits = 0, trials = 4000;
  auto coins = fair::make_coin_tpe();
  for (int t = 0; t < trials; ++t) {
    uint64_t F = t & 1;
    auto [lo, hi] = coins({F, Rng(t).next(), uint64_t(k), 1}, {0, Rng(t + 9000).next(), uint64_t(k), 1});
    hits += int((lo[0] ^ hi[0]) == F);
  }
  double p = double(hits) / trials, want = 0.5 + 1.0 / k;
  double sigma = std::sqrt(want * (1 - want) / trials);
  CHECK(std::abs(p - want) <= 4 * sigma);
}

TEST_CASE("majority over all coins errs exponentially rarely") {
  int k = 8, count = k * k * k + 1, trials = 1000, wrong = 0;
  auto coins = fair::make_coin_tpe();
  for (int t = 0; t < trials; ++t) {
    uint64_t F = t & 1;
    auto [lo, hi] = coins({F, uint64_t(3 * t + 1), uint64_t(k), uint64_t(count)},
                          {0, uint64_t(7 * t + 2), uint64_t(k), uint64_t(count)});
    int ones = 0;
    for (int j = 0; j < count; ++j) ones += int((lo[j] ^ hi[j]) & 1);
    uint64_t guess = 2 * ones > count ? 1 : 0;
    wrong += int(guess != F);
  }
  double bound = std::exp(-k / 2.0);
  double sigma = std::sqrt(bound * (1 - bound) / trials);
  CHECK(double(wrong) / trials <= bound + 3 * sigma);
}

TEST_CASE("per-coin advantage of the optimal guesser is bounded") {
  // exact enumeration over every coin prefix: the optimal guess after j
  // coins succeeds with S_j = (1/2) sum_d max_F P(d | F); one more coin
  // multiplies S_j by at most 2L/(1+L) = 1 + 2/k <= 1 + 4/k
  int k = 4;
  double hit = 0.5 + 1.0 / k, miss = 0.5 - 1.0 / k;
  double prev = 0.5;  // S_0: guess before any coin
  for (int len = 1; len <= 10; ++len) {
    double s = 0;
    for (uint64_t d = 0; d < (uint64_t(1) << len); ++d) {
      double p_f0 = 1, p_f1 = 1;
      for (int j = 0; j < len; ++j) {
        int dj = int(d >> j & 1);
        p_f0 *= dj == 0 ? hit : miss;  // d = F xor c, c = 0 favoured
        p_f1 *= dj == 1 ? hit : miss;
      }
      s += 0.5 * std::max(p_f0, p_f1);
    }
    double ratio = s / prev;
    CHECK(ratio <= 1.0 + 2.0 / k + 1e-12);
    CHECK(ratio <= 1.0 + 4.0 / k + 1e-12);
    prev = s;
  }
}

TEST_CASE("garbled gate sweep: AND and identity under every wire labeling") {
  Rng rng(5);
  int kk = 16;
  std::array<int, 4> tables[2] = {{0, 0, 0, 1}, {0, 0, 1, 1}};  // AND, pass-through X
  for (auto& g : tables)
    for (int wx = 0; wx < 2; ++wx)
      for (int wy = 0; wy < 2; ++wy)
        for (int wz = 0; wz < 2; ++wz) {
          fair::WireKeys X{rng.next() & 0xffff, rng.next() & 0xffff};
          fair::WireKeys Y{rng.next() & 0xffff, rng.next() & 0xffff};
          fair::WireKeys Z{rng.next() & 0xffff, rng.next() & 0xffff};
          auto gate = fair::yao_gate_encode(g, X, Y, Z, wx, wy, wz, kk);
          for (int va = 0; va < 2; ++va)
            for (int vb = 0; vb < 2; ++vb) {
              auto z = fair::yao_gate_decode(gate, X.at(va ^ wx), Y.at(vb ^ wy));
              REQUIRE(z);
              int vz = g[va * 2 + vb];
              REQUIRE(*z == Z.at(vz ^ wz));
            }
        }
}

TEST_CASE("the entry an evaluator opens says nothing about the values") {
  // with the keys fixed, sweeping the wire labels makes every claim pair
  // appear exactly once, whatever the actual values are
  Rng rng(9);
  fair::WireKeys X{rng.next() & 0xffff, rng.next() & 0xffff};
  fair::WireKeys Y{rng.next() & 0xffff, rng.next() & 0xffff};
  fair::WireKeys Z{rng.next() & 0xffff, rng.next() & 0xffff};
  std::array<int, 4> g{0, 0, 0, 1};
  for (int va = 0; va < 2; ++va)
    for (int vb = 0; vb < 2; ++vb) {
      std::map<int, int> opened;
      for (int wx = 0; wx < 2; ++wx)
        for (int wy = 0; wy < 2; ++wy) {
          auto gate = fair::yao_gate_encode(g, X, Y, Z, wx, wy, 0, 16);
          uint64_t kx = X.at(va ^ wx), ky = Y.at(vb ^ wy);
          auto px = fair::prg_expand(kx, 16), py = fair::prg_expand(ky, 16);
          for (int t = 0; t < 4; ++t)
            if (gate.e[t].tx == px.tag && gate.e[t].ty == py.tag) ++opened[t];
        }
      for (int t = 0; t < 4; ++t) CHECK(opened[t] == 1);
    }
}

TEST_CASE("tampered entries are caught") {
  Rng rng(21);
  int caught = 0, trials = 2000;
  std::array<int, 4> g{0, 1, 1, 0};
  for (int t = 0; t < trials; ++t) {
    fair::WireKeys X{rng.next() & 0xffff, rng.next() & 0xffff};
    fair::WireKeys Y{rng.next() & 0xffff, rng.next() & 0xffff};
    fair::WireKeys Z{rng.next() & 0xffff, rng.next() & 0xffff};
    int va = int(rng.bit()), vb = int(rng.bit());
    auto gate = fair::yao_gate_encode(g, X, Y, Z, 0, 0, 0, 16);
    // flip one tag bit in the entry the evaluator would open
    gate.e[va * 2 + vb].tx ^= uint64_t(1) << rng.below(16);
    auto z = fair::yao_gate_decode(gate, X.at(va), Y.at(vb));
    if (!z || *z != Z.at(g[va * 2 + vb])) ++caught;
  }
  double miss_bound = std::pow(2.0, -16);
  double sigma = std::sqrt(miss_bound * (1 - miss_bound) / trials) + 1e-9;
  CHECK(double(trials - caught) / trials <= miss_bound + 3 * sigma);
}

TEST_CASE("two-party evaluation of a garbled circuit") {
  fair::BoolCircuit xr;
  xr.n1 = 1;
  xr.n2 = 1;
  xr.gates.push_back({0, 1, {0, 1, 1, 0}});
  xr.out = 2;
  for (uint64_t x1 = 0; x1 < 2; ++x1)
    for (uint64_t x2 = 0; x2 < 2; ++x2) {
      SimOptions opt;
      opt.seed = 300 + 2 * x1 + x2;
      auto ex = run_protocol(2, [&](Ctx& ctx) {
        auto r = fair::eval2(ctx, xr, ctx.id == 1 ? x1 : x2);
        ctx.output({r ? uint64_t(1) : 0, r ? uint64_t(*r) : 0});
      }, opt);
      CHECK(ex.outputs[1][0] == 0);  // the garbler learns nothing
      CHECK(ex.outputs[2][0] == 1);
      CHECK(ex.outputs[2][1] == (x1 ^ x2));
    }
}

TEST_CASE("two-bit circuits against the plain evaluator") {
  // (x1a and x2a) xor (x1b or x2b)
  fair::BoolCircuit c;
  c.n1 = 2;
  c.n2 = 2;
  c.gates.push_back({0, 2, {0, 0, 0, 1}});
  c.gates.push_back({1, 3, {0, 1, 1, 1}});
  c.gates.push_back({4, 5, {0, 1, 1, 0}});
  c.out = 6;
  for (uint64_t x1 = 0; x1 < 4; ++x1)
    for (uint64_t x2 = 0; x2 < 4; ++x2) {
      int want = fair::eval2_plain(c, x1, x2);
      SimOptions opt;
      opt.seed = 500 + 4 * x1 + x2;
      auto ex = run_protocol(2, [&](Ctx& ctx) {
        auto r = fair::eval2(ctx, c, ctx.id == 1 ? x1 : x2);
        ctx.output({r ? uint64_t(1) : 0, r ? uint64_t(*r) : 0});
      }, opt);
      REQUIRE(ex.outputs[2][0] == 1);
      if (ex.outputs[2][1] != uint64_t(want)) REQUIRE(ex.outputs[2][1] == uint64_t(want));
    }
}

TEST_CASE("a constant circuit evaluates to its constant") {
  fair::BoolCircuit c;
  c.n1 = 1;
  c.n2 = 1;
  c.gates.push_back({0, 1, {1, 1, 1, 1}});
  c.out = 2;
  SimOptions opt;
  opt.seed = 77;
  auto ex = run_protocol(2, [&](Ctx& ctx) {
    auto r = fair::eval2(ctx, c, 0);
    ctx.output({r ? uint64_t(*r) : 9});
  }, opt);
  CHECK(ex.outputs[2][0] == 1);
}

TEST_CASE("generalized gate with no voided contributors matches the table") {
  Rng rng(31);
  std::array<int, 4> g{0, 0, 0, 1};
  std::vector<fair::WireKeys> X(2), Y(2);
  for (auto& w : X) w = {rng.next() & 0xffff, rng.next() & 0xffff};
  for (auto& w : Y) w = {rng.next() & 0xffff, rng.next() & 0xffff};
  fair::WireKeys Z{rng.next() & 0xffff, rng.next() & 0xffff};
  for (int wx = 0; wx < 2; ++wx)
    for (int wy = 0; wy < 2; ++wy) {
      auto gate = fair::generalized_gate_encode(g, X, Y, Z, {false, false}, wx, wy, 0, 16);
      for (int va = 0; va < 2; ++va)
        for (int vb = 0; vb < 2; ++vb) {
          auto z = fair::generalized_gate_decode(
              gate, {X[0].at(va ^ wx), X[1].at(va ^ wx)}, {Y[0].at(vb ^ wy), Y[1].at(vb ^ wy)});
          REQUIRE(z);
          REQUIRE(*z == Z.at(g[va * 2 + vb]));
        }
    }
}

TEST_CASE("voiding all but one contributor degenerates to the two-party gate") {
  Rng rng(37);
  std::array<int, 4> g{0, 1, 1, 1};
  std::vector<fair::WireKeys> X(3), Y(3);
  for (auto& w : X) w = {rng.next() & 0xffff, rng.next() & 0xffff};
  for (auto& w : Y) w = {rng.next() & 0xffff, rng.next() & 0xffff};
  fair::WireKeys Z{rng.next() & 0xffff, rng.next() & 0xffff};
  auto gen = fair::generalized_gate_encode(g, X, Y, Z, {true, false, true}, 1, 0, 1, 16);
  auto two = fair::yao_gate_encode(g, X[1], Y[1], Z, 1, 0, 1, 16);
  for (int t = 0; t < 4; ++t) {
    CHECK(gen.e[t].tx[0] == 0);
    CHECK(gen.e[t].tx[2] == 0);
    CHECK(gen.e[t].tx[1] == two.e[t].tx);
    CHECK(gen.e[t].ty[1] == two.e[t].ty);
    CHECK(gen.e[t].mz == two.e[t].mz);
  }
}

TEST_CASE("voiding every contributor is rejected") {
  Rng rng(41);
  std::array<int, 4> g{0, 0, 0, 1};
  std::vector<fair::WireKeys> X(2), Y(2);
  for (auto& w : X) w = {rng.next() & 0xffff, rng.next() & 0xffff};
  for (auto& w : Y) w = {rng.next() & 0xffff, rng.next() & 0xffff};
  fair::WireKeys Z{rng.next() & 0xffff, rng.next() & 0xffff};
  CHECK_THROWS_AS(fair::generalized_gate_encode(g, X, Y, Z, {true, true}, 0, 0, 0, 16),
                  std::invalid_argument);
  fair::GenGate gg;
  gg.n = 2;
  gg.voided = {true, true};
  CHECK_THROWS_AS(fair::generalized_gate_decode(gg, {0, 0}, {0, 0}), std::invalid_argument);
}
