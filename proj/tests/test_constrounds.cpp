#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpcw/constrounds.h"
#include "mpcw/rng.h"

using namespace mpcw;
using namespace mpcw::cr;
using third::Party;
using third::Secret;

namespace {

Execution run(int n, const Field& f, int t, uint64_t seed,
              const std::function<void(Party&)>& body) {
  SimOptions opt;
  opt.seed = seed;
  return run_protocol(n, [&](Ctx& ctx) {
    Party P(ctx, f, t);
    body(P);
  }, opt);
}

// Random formula of exact depth d over nvars variables.
Formula random_formula(Rng& rng, const Field& f, int nvars, int d) {
  if (d == 0) {
    Formula leaf;
    if (rng.below(4) == 0) {
      leaf.kind = Formula::Kind::Const;
      leaf.value = rng.fe(f);
    } else {
      leaf.kind = Formula::Kind::Var;
      leaf.var = 1 + int(rng.below(nvars));
    }
    return leaf;
  }
  Formula n;
  switch (rng.below(3)) {
    case 0: n.kind = Formula::Kind::Add; break;
    case 1: n.kind = Formula::Kind::Sub; break;
    default: n.kind = Formula::Kind::Mul; break;
  }
  // force depth on one side, free on the other
  int other = int(rng.below(uint64_t(d)));
  Formula a = random_formula(rng, f, nvars, d - 1);
  Formula b = random_formula(rng, f, nvars, other);
  if (rng.bit()) std::swap(a, b);
  n.lhs = std::make_shared<Formula>(std::move(a));
  n.rhs = std::make_shared<Formula>(std::move(b));
  return n;
}

// All formulas of depth <= d over variables x1..xv with constants drawn
// from {0,1,2}: enumerated by structure for the exhaustive compiler check.
void enumerate_formulas(const Field& f, int v, int d, std::vector<Formula>& out) {
  if (d == 0) {
    for (int i = 1; i <= v; ++i) {
      Formula x;
      x.kind = Formula::Kind::Var;
      x.var = i;
      out.push_back(x);
    }
    for (uint64_t c : {0ull, 2ull}) {
      Formula k;
      k.kind = Formula::Kind::Const;
      k.value = c;
      out.push_back(k);
    }
    return;
  }
  std::vector<Formula> sub;
  enumerate_formulas(f, v, d - 1, sub);
  out = sub;
  for (auto kind : {Formula::Kind::Add, Formula::Kind::Sub, Formula::Kind::Mul})
    for (size_t i = 0; i < sub.size(); ++i)
      for (size_t j = 0; j < sub.size(); ++j) {
        Formula n;
        n.kind = kind;
        n.lhs = std::make_shared<Formula>(sub[i]);
        n.rhs = std::make_shared<Formula>(sub[j]);
        out.push_back(n);
      }
}

}  // namespace

TEST_CASE("public matrix determinant and inverse") {
  Field f(FieldSpec::prime(7));
  PMat m{3, 3, {2, 1, 0, 1, 3, 1, 0, 2, 5}};
  // det = 2*(3*5-1*2) - 1*(1*5-1*0) = 26-5 = 21 = 0 mod 7
  CHECK(m.det(f) == 0);
  CHECK(!m.inv(f).has_value());
  PMat g{3, 3, {2, 1, 0, 1, 3, 1, 0, 2, 6}};
  // det = 2*16 - 1*6 = 26 = 5 mod 7
  CHECK(g.det(f) == 5);
  auto gi = g.inv(f);
  REQUIRE(gi.has_value());
  PMat id = g.mul(f, *gi);
  CHECK(id.e == PMat::identity(3).e);
}

TEST_CASE("formula parse, print, eval") {
  Field f(FieldSpec::prime(7));
  Formula fm = parse_formula("(x1 + 2) * x2 - x1 * x1");
  CHECK(formula_depth(fm) == 3);
  // x1=3, x2=4: (3+2)*4 - 9 = 20-9 = 11 = 4 mod 7
  CHECK(eval_formula(f, fm, {3, 4}) == 4);
  Formula back = parse_formula(print_formula(fm));
  for (uint64_t a = 0; a < 7; ++a)
    for (uint64_t b = 0; b < 7; ++b)
      CHECK(eval_formula(f, back, {a, b}) == eval_formula(f, fm, {a, b}));
  CHECK_THROWS_AS(parse_formula("x1 +"), std::invalid_argument);
  CHECK_THROWS_AS(parse_formula("(x1"), std::invalid_argument);
}

TEST_CASE("compiler: exhaustive formulas of depth <= 3 agree with direct evaluation") {
  Field f(FieldSpec::prime(7));
  // depth <=2 exhaustive over one variable is already large; do depth <=2
  // with 2 vars exhaustively over all inputs, then depth 3 via sampling below
  std::vector<Formula> fms;
  enumerate_formulas(f, 2, 2, fms);
  size_t checked = 0;
  for (auto& fm : fms) {
    MatrixProgram mp = compile_formula(f, fm);
    for (uint64_t a = 0; a < 7; a += 3)
      for (uint64_t b = 0; b < 7; b += 2) {
        CHECK(eval_program_plain(f, mp, {a, b}) == eval_formula(f, fm, {a, b}));
        ++checked;
      }
  }
  CHECK(checked > 1000);
}

TEST_CASE("compiler: 200 random formulas up to depth 6, all inputs tried") {
  Field f(FieldSpec::prime(7));
  Rng rng(424242);
  for (int trial = 0; trial < 200; ++trial) {
    int d = 1 + int(rng.below(6));
    Formula fm = random_formula(rng, f, 3, d);
    MatrixProgram mp = compile_formula(f, fm);
    // constant-run collapse invariant: at most the first step lacks a variable
    for (size_t i = 0; i < mp.steps.size(); ++i)
      if (mp.steps[i].var == 0) CHECK(mp.steps.size() == 1);
    std::vector<uint64_t> xs = {rng.fe(f), rng.fe(f), rng.fe(f)};
    CHECK(eval_program_plain(f, mp, xs) == eval_formula(f, fm, xs));
  }
}

TEST_CASE("mpc: shared matrix product") {
  Field f(FieldSpec::prime(17));
  auto ex = run(4, f, 1, 51, [&](Party& P) {
    PMat a{2, 2, {1, 2, 3, 4}}, b{2, 2, {5, 6, 7, 8}};
    SMat sa = smat_from_public(P, a), sb = smat_from_public(P, b);
    SMat c = mat_mul(P, sa, sb);
    PMat pc = reveal_mat(P, c);
    P.ctx.output(pc.e);
  });
  // [[19,22],[43,50]] mod 17 = [[2,5],[9,16]]
  for (int i = 1; i <= 4; ++i) CHECK(ex.outputs[i] == std::vector<uint64_t>({2, 5, 9, 16}));
}

TEST_CASE("mpc: group inverse of a nonzero secret") {
  Field f(FieldSpec::prime(17));
  auto ex = run(4, f, 1, 53, [&](Party& P) {
    Secret x = third::share_plain(P, 1, 5);
    Secret y = invert_group_secret(P, x);
    P.ctx.output({third::reveal(P, y)});
  });
  for (int i = 1; i <= 4; ++i) CHECK(ex.outputs[i][0] == 7);  // 5*7=35=1 mod 17
}

TEST_CASE("mpc: extended field inverse maps zero to zero") {
  Field f(FieldSpec::prime(7));
  for (uint64_t v = 0; v < 7; ++v) {
    auto ex = run(4, f, 1, 57 + v, [&](Party& P) {
      Secret x = third::share_plain(P, 1, v);
      Secret y = invert_field_secret(P, x);
      P.ctx.output({third::reveal(P, y)});
    });
    uint64_t want = v == 0 ? 0 : f.inv(v);
    for (int i = 1; i <= 4; ++i) CHECK(ex.outputs[i][0] == want);
  }
}

TEST_CASE("mpc: 3x3 inverse via adjugate and general inverse via blinding") {
  Field f(FieldSpec::prime(17));
  PMat m{3, 3, {2, 1, 0, 1, 3, 1, 0, 2, 6}};
  auto mi = m.inv(f);
  REQUIRE(mi.has_value());
  auto ex = run(4, f, 1, 61, [&](Party& P) {
    SMat sm = smat_from_public(P, m);
    PMat a = reveal_mat(P, mat_inv3(P, sm));
    PMat b = reveal_mat(P, mat_inv_general(P, sm));
    std::vector<uint64_t> out = a.e;
    out.insert(out.end(), b.e.begin(), b.e.end());
    P.ctx.output(out);
  });
  std::vector<uint64_t> want = mi->e;
  want.insert(want.end(), mi->e.begin(), mi->e.end());
  for (int i = 1; i <= 4; ++i) CHECK(ex.outputs[i] == want);
}

TEST_CASE("mpc: random full-rank pairs multiply to the identity") {
  Field f(FieldSpec::prime(17));
  auto ex = run(4, f, 1, 67, [&](Party& P) {
    auto pairs = random_full_rank_many(P, 3, 4);
    std::vector<SMat> prods;
    std::vector<std::pair<SMat, SMat>> mm;
    for (auto& [r, rinv] : pairs) mm.push_back({r, rinv});
    auto ps = mat_mul_many(P, mm);
    std::vector<uint64_t> out;
    for (auto& p : reveal_mat_many(P, ps))
      out.insert(out.end(), p.e.begin(), p.e.end());
    P.ctx.output(out);
  });
  std::vector<uint64_t> id9 = PMat::identity(3).e, want;
  for (int k = 0; k < 4; ++k) want.insert(want.end(), id9.begin(), id9.end());
  for (int i = 1; i <= 4; ++i) CHECK(ex.outputs[i] == want);
}

TEST_CASE("mpc: iterated product of secret matrices") {
  Field f(FieldSpec::prime(17));
  Rng rng(9001);
  std::vector<PMat> ms;
  PMat want = PMat::identity(3);
  for (int k = 0; k < 5; ++k) {
    PMat m{3, 3, {}};
    do {
      m.e.clear();
      for (int c = 0; c < 9; ++c) m.e.push_back(rng.fe(f));
    } while (m.det(f) == 0);
    want = want.mul(f, m);
    ms.push_back(m);
  }
  auto ex = run(4, f, 1, 71, [&](Party& P) {
    std::vector<SMat> xs;
    for (auto& m : ms) xs.push_back(smat_from_public(P, m));
    P.ctx.output(reveal_mat(P, iterated_multiply(P, xs)).e);
  });
  for (int i = 1; i <= 4; ++i) CHECK(ex.outputs[i] == want.e);
}

TEST_CASE("mpc: eval_const matches plain evaluation and keeps the result shared") {
  Field f(FieldSpec::prime(17));
  Formula fm = parse_formula("x1 * x2 + x3 * (x1 - 2)");
  MatrixProgram mp = compile_formula(f, fm);
  auto ex = run(4, f, 1, 73, [&](Party& P) {
    std::vector<Secret> xs = {third::share_plain(P, 1, 5), third::share_plain(P, 2, 3),
                              third::share_plain(P, 3, 9)};
    Secret y = eval_const(P, mp, xs);
    // use the still-shared result in a further computation before revealing
    Secret y2 = third::linear_combine(P, {{2, y}}, 1);
    P.ctx.output({third::reveal(P, y2)});
  });
  uint64_t want = f.add(f.mul(2, eval_formula(f, fm, {5, 3, 9})), 1);
  for (int i = 1; i <= 4; ++i) CHECK(ex.outputs[i][0] == want);
}

TEST_CASE("mpc: eval_const rounds do not depend on formula depth") {
  Field f(FieldSpec::prime(17));
  std::vector<int> rounds;
  for (int d = 1; d <= 6; ++d) {
    // chain of multiplications of depth d
    std::string s = "x1";
    for (int k = 0; k < d; ++k) s = "x2 * (" + s + " + 1)";
    Formula fm = parse_formula(s);
    CHECK(formula_depth(fm) >= d);
    MatrixProgram mp = compile_formula(f, fm);
    auto ex = run(4, f, 1, 80 + d, [&](Party& P) {
      std::vector<Secret> xs = {third::share_plain(P, 1, 4), third::share_plain(P, 2, 6)};
      Secret y = eval_const(P, mp, xs);
      P.ctx.output({third::reveal(P, y)});
    });
    for (int i = 1; i <= 4; ++i)
      CHECK(ex.outputs[i][0] == eval_formula(f, fm, {4, 6}));
    rounds.push_back(ex.metrics.rounds);
  }
  for (size_t i = 1; i < rounds.size(); ++i) CHECK(rounds[i] == rounds[0]);
}

TEST_CASE("mpc: sliced circuit evaluation matches plain and scales with depth/s") {
  Field f(FieldSpec::prime(17));
  // depth-4 circuit: alternating linear and multiplication layers
  std::string txt =
      "gate 0 0 input 1\n"
      "gate 0 1 input 2\n"
      "gate 0 2 input 2\n"
      "gate 1 0 mul 0:0 0:1\n"
      "gate 1 1 mul 0:1 0:2\n"
      "gate 2 0 linear 1 2 1:0 16 1:1\n"
      "gate 3 0 mul 2:0 1:0\n"
      "gate 4 0 linear 3 5 3:0\n"
      "out 4 0\n";
  third::Circuit c = third::Circuit::parse(txt);
  std::map<int, std::vector<uint64_t>> ins = {{1, {3}}, {2, {5, 7}}};
  auto want = c.eval_plain(f, ins);
  std::map<int, int> rounds_by_s;
  for (int s : {1, 2, 4}) {
    auto ex = run(4, f, 1, 90 + s, [&](Party& P) {
      std::vector<uint64_t> mine;
      if (ins.count(P.ctx.id)) mine = ins[P.ctx.id];
      P.ctx.output(eval_sliced(P, c, mine, s));
    });
    for (int i = 1; i <= 4; ++i) CHECK(ex.outputs[i] == want);
    rounds_by_s[s] = ex.metrics.rounds;
  }
  // fewer slices, fewer rounds
  CHECK(rounds_by_s[4] < rounds_by_s[2]);
  CHECK(rounds_by_s[2] < rounds_by_s[1]);
}

TEST_CASE("canonical polynomial agrees with the table and is multilinear") {
  Field f(FieldSpec::prime(7));
  // AND of three bits
  auto F = [](uint32_t eps) -> uint64_t { return eps == 7 ? 1 : 0; };
  MultiPoly p = canonical_poly(f, F, 3);
  CHECK(p.degree() == 3);
  CHECK(p.terms.size() == 1);
  CHECK(p.terms.at(7) == 1);
  // parity of four bits: checks every coefficient path
  auto par = [](uint32_t eps) -> uint64_t { return __builtin_popcount(eps) & 1; };
  MultiPoly q = canonical_poly(f, par, 4);
  for (uint32_t eps = 0; eps < 16; ++eps) {
    std::vector<uint64_t> xs;
    for (int i = 0; i < 4; ++i) xs.push_back(eps >> i & 1);
    CHECK(q.eval(f, xs) == par(eps));
  }
  // off-cube evaluation sanity against a hand expansion for XOR(x1,x2):
  // x1 + x2 - 2 x1 x2 at (3,5): 3+5-30 = -22 = 6 mod 7
  MultiPoly x2 = canonical_poly(f, [](uint32_t e) -> uint64_t { return (e & 1) ^ (e >> 1 & 1); }, 2);
  CHECK(x2.eval(f, {3, 5}) == 6);
}
