#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpcw/netsim.h"

using namespace mpcw;

TEST_CASE("round-synchronous delivery and broadcast") {
  auto program = [](Ctx& ctx) {
    ctx.send(ctx.id % ctx.n + 1, {uint64_t(ctx.id * 10)});
    ctx.broadcast({uint64_t(ctx.id)});
    auto inbox = ctx.round();
    uint64_t sum = 0;
    int privs = 0;
    for (auto& m : inbox) {
      if (m.ch == Channel::Broadcast) sum += m.data[0];
      if (m.ch == Channel::Private) ++privs;
    }
    ctx.output({sum, uint64_t(privs)});
  };
  auto ex = run_protocol(3, program, 7);
  for (int i = 1; i <= 3; ++i) {
    CHECK(ex.outputs[i][0] == 6);  // sees all broadcasts including its own
    CHECK(ex.outputs[i][1] == 1);  // exactly one private message each
  }
  CHECK(ex.metrics.rounds == 1);
  CHECK(ex.metrics.messages == 6);
}

TEST_CASE("identical seeds give byte-identical traces; different seeds differ") {
  auto program = [](Ctx& ctx) {
    ctx.broadcast({ctx.rng.next() & 0xffff});
    ctx.round();
    ctx.output({});
  };
  auto a = run_protocol(4, program, 11);
  auto b = run_protocol(4, program, 11);
  auto c = run_protocol(4, program, 12);
  CHECK(a.trace_text() == b.trace_text());
  CHECK(a.trace_text() != c.trace_text());
}

TEST_CASE("ot channel delivers about half the messages") {
  const int N = 2000;
  auto program = [](Ctx& ctx) {
    if (ctx.id == 1) {
      for (int i = 0; i < 2000; ++i) {
        ctx.ot_send(2, {uint64_t(i)});
        ctx.round();
      }
      ctx.output({});
    } else {
      uint64_t got = 0;
      for (int i = 0; i < 2000; ++i) {
        auto inbox = ctx.round();
        for (auto& m : inbox)
          if (m.ch == Channel::OT) ++got;
      }
      ctx.output({got});
    }
  };
  auto ex = run_protocol(2, program, 5);
  double frac = double(ex.outputs[2][0]) / N;
  CHECK(frac > 0.45);
  CHECK(frac < 0.55);
}

TEST_CASE("ideal 1-2-OT delivers exactly the chosen message") {
  for (int choice = 0; choice < 2; ++choice) {
    auto program = [choice](Ctx& ctx) {
      if (ctx.id == 1) {
        ctx.ot12_send(2, {111}, {222, 223});
        ctx.round();
        ctx.output({});
      } else {
        ctx.ot12_choose(1, choice);
        auto inbox = ctx.round();
        ctx.output(Ctx::from(inbox, 1, Channel::OT12Deliver));
      }
    };
    auto ex = run_protocol(2, program, 3);
    if (choice == 0)
      CHECK(ex.outputs[2] == std::vector<uint64_t>{111});
    else
      CHECK(ex.outputs[2] == std::vector<uint64_t>({222, 223}));
  }
}

TEST_CASE("ideal two-party evaluation computes a registered function") {
  SimOptions opt;
  opt.seed = 9;
  opt.tpe_registry[1] = [](const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
    return std::make_pair(std::vector<uint64_t>{a[0] + b[0]}, std::vector<uint64_t>{a[0] * b[0]});
  };
  auto program = [](Ctx& ctx) {
    ctx.tpe_post(ctx.id == 1 ? 2 : 1, 1, {uint64_t(ctx.id + 3)});
    auto inbox = ctx.round();
    ctx.output(Ctx::from(inbox, ctx.id == 1 ? 2 : 1, Channel::TPEResult));
  };
  auto ex = run_protocol(2, program, opt);
  CHECK(ex.outputs[1] == std::vector<uint64_t>{9});   // 4+5
  CHECK(ex.outputs[2] == std::vector<uint64_t>{20});  // 4*5
}

TEST_CASE("fail-stop adversary silences a player from its halt round") {
  SimOptions opt;
  opt.seed = 2;
  opt.adversary.kind = Adversary::Kind::FailStop;
  opt.adversary.corrupt = {2};
  opt.adversary.halt_round = 1;
  auto program = [](Ctx& ctx) {
    for (int r = 0; r < 3; ++r) {
      ctx.broadcast({uint64_t(100 * ctx.id + r)});
      auto inbox = ctx.round();
      if (ctx.id == 1) {
        int from2 = 0;
        for (auto& m : inbox)
          if (m.from == 2) ++from2;
        if (r == 0) CHECK(from2 == 1);
        if (r >= 1) CHECK(from2 == 0);
      }
    }
    ctx.output({});
  };
  run_protocol(3, program, opt);
}

TEST_CASE("byzantine tamper hook rewrites corrupt traffic only") {
  SimOptions opt;
  opt.seed = 2;
  opt.adversary.kind = Adversary::Kind::Byzantine;
  opt.adversary.corrupt = {3};
  opt.adversary.tamper = [](int, const std::vector<Msg>&, Msg& m) { m.data = {999}; };
  auto program = [](Ctx& ctx) {
    ctx.broadcast({uint64_t(ctx.id)});
    auto inbox = ctx.round();
    std::vector<uint64_t> seen;
    for (auto& m : inbox) seen.push_back(m.data[0]);
    ctx.output(seen);
  };
  auto ex = run_protocol(3, program, opt);
  CHECK(ex.outputs[1] == std::vector<uint64_t>({1, 2, 999}));
}

TEST_CASE("check-vector setup: tags verify and forgery needs the hidden bits") {
  Field f(FieldSpec::prime(101));
  SimOptions opt;
  opt.seed = 4;
  opt.cv_field = &f;
  const uint64_t value = 42;
  const int k = 16;
  auto program = [&](Ctx& ctx) {
    if (ctx.id == 1) ctx.cv_issue(2, 3, value, k);  // player 1 deals value to 2, checker 3
    auto inbox = ctx.round();
    if (ctx.id == 2) ctx.output(Ctx::from(inbox, 1, Channel::CVTag));
    if (ctx.id == 3) ctx.output(Ctx::from(inbox, 1, Channel::CVKey));
  };
  auto ex = run_protocol(3, program, opt);
  auto tags = ex.outputs[2];  // [checker, label, m_1..m_k]
  auto keys = ex.outputs[3];  // [owner, label, (bit,pad) x k]
  REQUIRE(tags.size() == 2 + k);
  REQUIRE(keys.size() == size_t(2 + 2 * k));
  int bits_set = 0;
  for (int l = 0; l < k; ++l) {
    uint64_t bit = keys[2 + 2 * l], pad = keys[3 + 2 * l];
    CHECK(tags[2 + l] == f.add(pad, bit ? value : 0));
    bits_set += int(bit);
  }
  CHECK(bits_set > 0);
  CHECK(bits_set < k);
}

TEST_CASE("metrics account rounds, messages and bits") {
  auto program = [](Ctx& ctx) {
    ctx.send(ctx.id == 1 ? 2 : 1, {1, 2, 3});
    ctx.round();
    ctx.round();
    ctx.output({});
  };
  auto ex = run_protocol(2, program, 1);
  CHECK(ex.metrics.rounds == 2);
  CHECK(ex.metrics.messages == 2);
  CHECK(ex.metrics.total_bits == 2 * 3 * 64);
  CHECK(ex.metrics.bits_sent_by.at(1) == 192);
}
