#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpcw/privacy.h"
#include "mpcw/rng.h"

using namespace mpcw;
using privacy::FunctionTable;
using privacy::Witness;

namespace {

FunctionTable table(size_t nx, size_t ny, std::vector<uint64_t> v) {
  return FunctionTable{nx, ny, std::move(v)};
}

// party 1 announces x, then party 2 announces f(x, y): always correct,
// private only when no column repeats a value
privacy::TwoPartyProtocol announce_x(const FunctionTable& t) {
  auto tp = std::make_shared<FunctionTable>(t);
  privacy::TwoPartyProtocol p;
  p.next_speaker = [](const std::vector<uint64_t>& tr) {
    return tr.size() == 0 ? 1 : tr.size() == 1 ? 2 : 0;
  };
  p.speak = [tp](int s, uint64_t in, const std::vector<uint64_t>& tr, uint64_t) {
    return s == 1 ? in : tp->at(tr[0], in);
  };
  p.output = [](int, uint64_t, const std::vector<uint64_t>& tr) { return tr[1]; };
  return p;
}

privacy::TwoPartyProtocol announce_y(const FunctionTable& t) {
  auto tp = std::make_shared<FunctionTable>(t);
  privacy::TwoPartyProtocol p;
  p.next_speaker = [](const std::vector<uint64_t>& tr) {
    return tr.size() == 0 ? 2 : tr.size() == 1 ? 1 : 0;
  };
  p.speak = [tp](int s, uint64_t in, const std::vector<uint64_t>& tr, uint64_t) {
    return s == 2 ? in : tp->at(in, tr[0]);
  };
  p.output = [](int, uint64_t, const std::vector<uint64_t>& tr) { return tr[1]; };
  return p;
}

bool protocol_correct(const privacy::TwoPartyProtocol& p, const FunctionTable& t) {
  for (size_t x = 0; x < t.nx; ++x)
    for (size_t y = 0; y < t.ny; ++y) {
      auto tr = privacy::run_transcript(p, x, y);
      if (p.output(1, x, tr) != t.at(x, y)) return false;
      if (p.output(2, y, tr) != t.at(x, y)) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("csv round trip and shape errors") {
  auto t = FunctionTable::parse_csv("0,1,2\n3,4,5\n");
  CHECK(t.nx == 2);
  CHECK(t.ny == 3);
  CHECK(t.at(1, 2) == 5);
  CHECK(FunctionTable::parse_csv(t.to_csv()).v == t.v);
  CHECK_THROWS(FunctionTable::parse_csv("0,1\n2\n"));
  CHECK_THROWS(FunctionTable::parse_csv(""));
}

TEST_CASE("the AND table is not partitionable") {
  auto t = table(2, 2, {0, 0, 0, 1});
  CHECK(privacy::is_partitionable(t) == nullptr);
}

TEST_CASE("x + y mod 7 is partitionable") {
  std::vector<uint64_t> v;
  for (uint64_t x = 0; x < 7; ++x)
    for (uint64_t y = 0; y < 7; ++y) v.push_back((x + y) % 7);
  auto t = table(7, 7, v);
  auto w = privacy::is_partitionable(t);
  REQUIRE(w);
  CHECK(privacy::witness_valid(t, *w));
  CHECK(w->kind == Witness::Kind::SplitCols);  // column splits preferred

  auto p = privacy::synthesize_protocol(t, *w);
  CHECK(protocol_correct(p, t));
  CHECK(privacy::privacy_audit(p, t).ok());
}

TEST_CASE("a table splittable by neither rows nor columns") {
  auto t = table(3, 3, {0, 0, 1, 3, 4, 1, 3, 2, 2});
  CHECK(privacy::is_partitionable(t) == nullptr);
}

TEST_CASE("constant tables need no conversation") {
  auto t = table(3, 4, std::vector<uint64_t>(12, 9));
  auto w = privacy::is_partitionable(t);
  REQUIRE(w);
  CHECK(w->kind == Witness::Kind::Constant);
  auto p = privacy::synthesize_protocol(t, *w);
  for (size_t x = 0; x < 3; ++x)
    for (size_t y = 0; y < 4; ++y) CHECK(privacy::run_transcript(p, x, y).empty());
  CHECK(protocol_correct(p, t));
  CHECK(privacy::privacy_audit(p, t).ok());
}

TEST_CASE("same-output inputs share one transcript") {
  auto t = table(2, 2, {1, 2, 1, 3});
  auto w = privacy::is_partitionable(t);
  REQUIRE(w);
  auto p = privacy::synthesize_protocol(t, *w);
  CHECK(privacy::run_transcript(p, 0, 0) == privacy::run_transcript(p, 1, 0));
  CHECK(protocol_correct(p, t));
  CHECK(privacy::privacy_audit(p, t).ok());
}

TEST_CASE("witness print and independent recheck") {
  auto t = table(2, 2, {1, 2, 1, 3});
  auto w = privacy::is_partitionable(t);
  REQUIRE(w);
  CHECK(privacy::witness_valid(t, *w));
  CHECK(w->print().find("const") != std::string::npos);
  // a corrupted witness is rejected
  Witness bad;
  bad.kind = Witness::Kind::Constant;
  bad.value = 7;
  CHECK_FALSE(privacy::witness_valid(t, bad));
  CHECK_THROWS(privacy::synthesize_protocol(t, bad));
}

TEST_CASE("broadcasting x over the AND table leaks") {
  auto t = table(2, 2, {0, 0, 0, 1});
  auto rep = privacy::privacy_audit(announce_x(t), t);
  REQUIRE(!rep.violations.empty());
  // rows x = 0, 1 share output 0 in column y = 0 but transcripts differ
  bool found = false;
  for (auto& v : rep.violations)
    found = found || (v.against == 2 && v.fixed == 0 && v.a == 0 && v.b == 1);
  CHECK(found);
}

TEST_CASE("random partitionable tables synthesize to private protocols") {
  Rng rng(71);
  int made = 0;
  while (made < 12) {
    std::vector<uint64_t> v(16);
    for (auto& e : v) e = rng.below(6);
    auto t = table(4, 4, v);
    auto w = privacy::is_partitionable(t);
    if (!w) {
      // negative spot audit: both one-shot protocols leak
      if (made % 3 == 0) {
        CHECK(!privacy::privacy_audit(announce_x(t), t).violations.empty());
        CHECK(!privacy::privacy_audit(announce_y(t), t).violations.empty());
      }
      continue;
    }
    ++made;
    CHECK(privacy::witness_valid(t, *w));
    auto p = privacy::synthesize_protocol(t, *w);
    CHECK(protocol_correct(p, t));
    CHECK(privacy::privacy_audit(p, t).ok());
  }
}

TEST_CASE("every boolean 3x3 table: partitionable iff privately computable") {
  for (uint64_t bits = 0; bits < (1u << 9); ++bits) {
    std::vector<uint64_t> v(9);
    for (int i = 0; i < 9; ++i) v[i] = bits >> i & 1;
    auto t = table(3, 3, v);
    auto w = privacy::is_partitionable(t);
    if (w) {
      if (!privacy::witness_valid(t, *w)) REQUIRE(privacy::witness_valid(t, *w));
      auto p = privacy::synthesize_protocol(t, *w);
      if (!protocol_correct(p, t)) REQUIRE(protocol_correct(p, t));
      auto rep = privacy::privacy_audit(p, t);
      if (!rep.ok()) REQUIRE(rep.ok());
    } else {
      CHECK_THROWS(privacy::synthesize_protocol(t, Witness{}));
      auto r1 = privacy::privacy_audit(announce_x(t), t);
      auto r2 = privacy::privacy_audit(announce_y(t), t);
      if (r1.violations.empty()) REQUIRE(!r1.violations.empty());
      if (r2.violations.empty()) REQUIRE(!r2.violations.empty());
    }
  }
}

TEST_CASE("bounded random tapes are enumerated, longer ones rejected") {
  auto t = table(2, 2, {1, 2, 1, 3});
  auto w = privacy::is_partitionable(t);
  REQUIRE(w);
  auto p = privacy::synthesize_protocol(t, *w);

  // pad the conversation with one uniform bit from each side: still private,
  // the padding distribution is input-independent
  privacy::TwoPartyProtocol padded = p;
  auto base_next = p.next_speaker;
  padded.tape_bits1 = 1;
  padded.tape_bits2 = 1;
  padded.next_speaker = [base_next](const std::vector<uint64_t>& tr) {
    if (tr.size() == 0) return 1;
    if (tr.size() == 1) return 2;
    std::vector<uint64_t> core(tr.begin() + 2, tr.end());
    return base_next(core);
  };
  auto base_speak = p.speak;
  padded.speak = [base_speak](int s, uint64_t in, const std::vector<uint64_t>& tr,
                              uint64_t tape) {
    if (tr.size() < 2) return tape & 1;
    std::vector<uint64_t> core(tr.begin() + 2, tr.end());
    return base_speak(s, in, core, tape);
  };
  auto rep = privacy::privacy_audit(padded, t);
  CHECK(rep.ok());

  // a tape bit correlated with the input leaks even on same-output pairs
  privacy::TwoPartyProtocol leaky = padded;
  leaky.speak = [base_speak](int s, uint64_t in, const std::vector<uint64_t>& tr,
                             uint64_t tape) {
    if (tr.size() < 2) return s == 1 ? (tape ^ in) & 1 : tape & 1;
    std::vector<uint64_t> core(tr.begin() + 2, tr.end());
    return base_speak(s, in, core, tape);
  };
  // biased pad: party 1 sends (tape xor x) with a constant tape => sends x
  leaky.tape_bits1 = 0;
  auto rep2 = privacy::privacy_audit(leaky, t);
  CHECK(!rep2.violations.empty());

  privacy::TwoPartyProtocol heavy = padded;
  heavy.tape_bits1 = 5;
  heavy.tape_bits2 = 4;
  CHECK(privacy::privacy_audit(heavy, t).unauditable);
}
