#include "mpcw/constrounds.h"

#include <cctype>
#include <sstream>

namespace mpcw::cr {

using third::linear_combine;
using third::multiply_many;
using third::reveal_many;
using third::share_plain_many;

// ---------------- public matrices ----------------

PMat PMat::identity(int d) {
  PMat m{d, d, std::vector<uint64_t>(size_t(d) * d, 0)};
  for (int i = 0; i < d; ++i) m.at(i, i) = 1;
  return m;
}

PMat PMat::mul(const Field& f, const PMat& o) const {
  PMat r{nr, o.nc, std::vector<uint64_t>(size_t(nr) * o.nc, 0)};
  for (int i = 0; i < nr; ++i)
    for (int k = 0; k < nc; ++k)
      for (int j = 0; j < o.nc; ++j)
        r.at(i, j) = f.add(r.at(i, j), f.mul(at(i, k), o.at(k, j)));
  return r;
}

uint64_t PMat::det(const Field& f) const {
  PMat m = *this;
  uint64_t d = 1;
  for (int c = 0, r = 0; c < nc && r < nr; ++c, ++r) {
    int sel = r;
    while (sel < nr && m.at(sel, c) == 0) ++sel;
    if (sel == nr) return 0;
    if (sel != r) {
      for (int j = 0; j < nc; ++j) std::swap(m.at(sel, j), m.at(r, j));
      d = f.neg(d);
    }
    d = f.mul(d, m.at(r, c));
    uint64_t inv = f.inv(m.at(r, c));
    for (int i = r + 1; i < nr; ++i) {
      uint64_t fac = f.mul(m.at(i, c), inv);
      for (int j = c; j < nc; ++j) m.at(i, j) = f.sub(m.at(i, j), f.mul(fac, m.at(r, j)));
    }
  }
  return d;
}

std::optional<PMat> PMat::inv(const Field& f) const {
  int d = nr;
  PMat m = *this, r = identity(d);
  for (int c = 0; c < d; ++c) {
    int sel = c;
    while (sel < d && m.at(sel, c) == 0) ++sel;
    if (sel == d) return std::nullopt;
    for (int j = 0; j < d; ++j) {
      std::swap(m.at(sel, j), m.at(c, j));
      std::swap(r.at(sel, j), r.at(c, j));
    }
    uint64_t inv = f.inv(m.at(c, c));
    for (int j = 0; j < d; ++j) {
      m.at(c, j) = f.mul(m.at(c, j), inv);
      r.at(c, j) = f.mul(r.at(c, j), inv);
    }
    for (int i = 0; i < d; ++i) {
      if (i == c || m.at(i, c) == 0) continue;
      uint64_t fac = m.at(i, c);
      for (int j = 0; j < d; ++j) {
        m.at(i, j) = f.sub(m.at(i, j), f.mul(fac, m.at(c, j)));
        r.at(i, j) = f.sub(r.at(i, j), f.mul(fac, r.at(c, j)));
      }
    }
  }
  return r;
}

// ---------------- shared matrices ----------------

SMat smat_from_public(Party& P, const PMat& m) {
  SMat s{m.nr, m.nc, {}};
  for (auto v : m.e) s.e.push_back(third::Secret{v, true});  // constant sharing
  return s;
}

std::vector<SMat> mat_mul_many(Party& P, const std::vector<std::pair<SMat, SMat>>& pairs) {
  std::vector<std::pair<Secret, Secret>> prods;
  for (auto& [a, b] : pairs)
    for (int i = 0; i < a.nr; ++i)
      for (int j = 0; j < b.nc; ++j)
        for (int k = 0; k < a.nc; ++k) prods.push_back({a.at(i, k), b.at(k, j)});
  auto res = multiply_many(P, prods);
  std::vector<SMat> out;
  size_t pos = 0;
  for (auto& [a, b] : pairs) {
    SMat m{a.nr, b.nc, std::vector<Secret>(size_t(a.nr) * b.nc)};
    for (int i = 0; i < a.nr; ++i)
      for (int j = 0; j < b.nc; ++j) {
        std::vector<std::pair<uint64_t, Secret>> terms;
        for (int k = 0; k < a.nc; ++k) terms.push_back({1, res[pos++]});
        m.at(i, j) = linear_combine(P, terms, 0);
      }
    out.push_back(std::move(m));
  }
  return out;
}

SMat mat_mul(Party& P, const SMat& a, const SMat& b) { return mat_mul_many(P, {{a, b}})[0]; }

SMat mat_mul_public_left(Party& P, const PMat& a, const SMat& b) {
  SMat r{a.nr, b.nc, std::vector<Secret>(size_t(a.nr) * b.nc)};
  for (int i = 0; i < a.nr; ++i)
    for (int j = 0; j < b.nc; ++j) {
      std::vector<std::pair<uint64_t, Secret>> terms;
      for (int k = 0; k < a.nc; ++k) terms.push_back({a.at(i, k), b.at(k, j)});
      r.at(i, j) = linear_combine(P, terms, 0);
    }
  return r;
}

SMat mat_mul_public_right(Party& P, const SMat& a, const PMat& b) {
  SMat r{a.nr, b.nc, std::vector<Secret>(size_t(a.nr) * b.nc)};
  for (int i = 0; i < a.nr; ++i)
    for (int j = 0; j < b.nc; ++j) {
      std::vector<std::pair<uint64_t, Secret>> terms;
      for (int k = 0; k < a.nc; ++k) terms.push_back({b.at(k, j), a.at(i, k)});
      r.at(i, j) = linear_combine(P, terms, 0);
    }
  return r;
}

std::vector<PMat> reveal_mat_many(Party& P, const std::vector<SMat>& ms) {
  std::vector<Secret> all;
  for (auto& m : ms) all.insert(all.end(), m.e.begin(), m.e.end());
  auto vals = reveal_many(P, all);
  std::vector<PMat> out;
  size_t pos = 0;
  for (auto& m : ms) {
    PMat p{m.nr, m.nc, {}};
    for (size_t k = 0; k < m.e.size(); ++k) p.e.push_back(vals[pos++]);
    out.push_back(std::move(p));
  }
  return out;
}

PMat reveal_mat(Party& P, const SMat& m) { return reveal_mat_many(P, {m})[0]; }

// cheap jointly-random secrets for blinding: every player shares one
// summand; one round instead of a full VSS batch
static std::vector<Secret> blind_rand_many(Party& P, size_t count) {
  std::vector<std::pair<int, uint64_t>> deals;
  for (size_t k = 0; k < count; ++k)
    for (int i = 1; i <= P.n; ++i) deals.push_back({i, i == P.ctx.id ? P.ctx.rng.fe(P.f) : 0});
  auto got = share_plain_many(P, deals);
  std::vector<Secret> out(count);
  for (size_t k = 0; k < count; ++k) {
    std::vector<std::pair<uint64_t, Secret>> terms;
    for (int i = 0; i < P.n; ++i) terms.push_back({1, got[k * P.n + i]});
    out[k] = linear_combine(P, terms, 0);
  }
  return out;
}

Secret invert_group_secret(Party& P, const Secret& X) {
  for (;;) {
    Secret R = blind_rand_many(P, 1)[0];
    Secret V = third::multiply(P, R, X);
    uint64_t v = reveal_many(P, {V})[0];
    if (v != 0) return linear_combine(P, {{P.f.inv(v), R}}, 0);
  }
}

Secret invert_field_secret(Party& P, const Secret& X, int batch) {
  const Field& f = P.f;
  for (;;) {
    auto rs = blind_rand_many(P, 2 * size_t(batch));
    // P_i = R_i S_i ; U_i = R_i (1 - P_i) ; V_i = S_i (1 - P_i)
    std::vector<std::pair<Secret, Secret>> mm;
    for (int i = 0; i < batch; ++i) mm.push_back({rs[2 * i], rs[2 * i + 1]});
    auto prods = multiply_many(P, mm);
    std::vector<std::pair<Secret, Secret>> uv;
    for (int i = 0; i < batch; ++i) {
      Secret one_minus = linear_combine(P, {{f.neg(1), prods[i]}}, 1);
      uv.push_back({rs[2 * i], one_minus});
      uv.push_back({rs[2 * i + 1], one_minus});
    }
    auto uvs = multiply_many(P, uv);
    auto vals = reveal_many(P, uvs);
    std::vector<int> qual;
    for (int i = 0; i < batch; ++i)
      if (vals[2 * i] == 0 && vals[2 * i + 1] == 0) qual.push_back(i);
    if (!qual.empty()) {
      std::vector<Secret> diffs;
      for (int i : qual) diffs.push_back(linear_combine(P, {{1, X}, {f.neg(1), rs[2 * i]}}, 0));
      auto dv = reveal_many(P, diffs);
      for (size_t j = 0; j < qual.size(); ++j)
        if (dv[j] == 0) return rs[2 * qual[j] + 1];
    }
  }
}

std::vector<std::pair<SMat, SMat>> random_full_rank_many(Party& P, int dim, int count,
                                                         int attempts) {
  const size_t cells = size_t(dim) * dim;
  auto rnd = blind_rand_many(P, size_t(count) * attempts * 2 * cells);
  std::vector<std::pair<SMat, SMat>> cand;
  size_t pos = 0;
  for (int s = 0; s < count * attempts; ++s) {
    SMat R{dim, dim, {}}, S{dim, dim, {}};
    for (size_t c = 0; c < cells; ++c) R.e.push_back(rnd[pos++]);
    for (size_t c = 0; c < cells; ++c) S.e.push_back(rnd[pos++]);
    cand.push_back({std::move(R), std::move(S)});
  }
  auto us = mat_mul_many(P, cand);
  auto pubs = reveal_mat_many(P, us);
  std::vector<std::pair<SMat, SMat>> out;
  for (int slot = 0; slot < count; ++slot) {
    bool done = false;
    for (int a = 0; a < attempts && !done; ++a) {
      int idx = slot * attempts + a;
      auto uinv = pubs[idx].inv(P.f);
      if (!uinv) continue;
      // R is full rank since U = R*S is; R^{-1} = S U^{-1}
      SMat rinv = mat_mul_public_right(P, cand[idx].second, *uinv);
      out.push_back({cand[idx].first, std::move(rinv)});
      done = true;
    }
    if (!done) throw std::runtime_error("no full-rank candidate found; raise attempts");
  }
  return out;
}

std::pair<SMat, SMat> random_full_rank(Party& P, int dim) {
  return random_full_rank_many(P, dim, 1)[0];
}

SMat mat_inv3(Party& P, const SMat& m) {
  if (m.nr != 3 || m.nc != 3) throw std::invalid_argument("mat_inv3 wants 3x3");
  const Field& f = P.f;
  // layer 1: all 2x2 minors (cofactors), each a sum of two products
  auto minor_terms = [&](int r, int c) {
    int r1 = (r + 1) % 3, r2 = (r + 2) % 3, c1 = (c + 1) % 3, c2 = (c + 2) % 3;
    if (r1 > r2) std::swap(r1, r2);
    if (c1 > c2) std::swap(c1, c2);
    return std::array<std::pair<int, int>, 4>{{{r1, c1}, {r2, c2}, {r1, c2}, {r2, c1}}};
  };
  std::vector<std::pair<Secret, Secret>> l1;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      auto tt = minor_terms(r, c);
      l1.push_back({m.at(tt[0].first, tt[0].second), m.at(tt[1].first, tt[1].second)});
      l1.push_back({m.at(tt[2].first, tt[2].second), m.at(tt[3].first, tt[3].second)});
    }
  auto p1 = multiply_many(P, l1);
  std::vector<Secret> cof(9);  // cofactor C(r,c) with sign baked in
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      size_t k = size_t(r * 3 + c) * 2;
      Secret det2 = linear_combine(P, {{1, p1[k]}, {f.neg(1), p1[k + 1]}}, 0);
      uint64_t sign = ((r + c) % 2 == 0) ? 1 : f.neg(1);
      cof[r * 3 + c] = linear_combine(P, {{sign, det2}}, 0);
    }
  // det = sum_c m(0,c) * C(0,c)
  std::vector<std::pair<Secret, Secret>> l2;
  for (int c = 0; c < 3; ++c) l2.push_back({m.at(0, c), cof[c]});
  auto p2 = multiply_many(P, l2);
  Secret det = linear_combine(P, {{1, p2[0]}, {1, p2[1]}, {1, p2[2]}}, 0);
  Secret det_inv = invert_group_secret(P, det);
  // inverse = det^{-1} * adj, adj = cofactor transpose
  std::vector<std::pair<Secret, Secret>> l3;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) l3.push_back({cof[c * 3 + r], det_inv});
  auto p3 = multiply_many(P, l3);
  SMat out{3, 3, {}};
  out.e.assign(p3.begin(), p3.end());
  return out;
}

SMat mat_inv_general(Party& P, const SMat& m) {
  auto [R, Rinv] = random_full_rank(P, m.nr);
  SMat W = mat_mul(P, R, m);
  PMat w = reveal_mat(P, W);
  auto winv = w.inv(P.f);
  if (!winv) throw std::domain_error("matrix is singular");
  // X^{-1} = W^{-1} R
  return mat_mul_public_left(P, *winv, R);
}

static std::vector<SMat> iterated_multiply_many(Party& P, const std::vector<std::vector<SMat>>& groups) {
  const Field& f = P.f;
  int total = 0, dim = 0;
  for (auto& g : groups) {
    total += int(g.size()) + 1;
    if (!g.empty()) dim = g[0].nr;
  }
  if (dim == 0) dim = 3;
  auto pairs = random_full_rank_many(P, dim, total);
  // S_j = R_{j-1}^{-1} X_j R_j, batched in two layers across all groups
  std::vector<std::pair<SMat, SMat>> layer1;
  size_t base = 0;
  for (auto& g : groups) {
    for (size_t j = 0; j < g.size(); ++j) layer1.push_back({pairs[base + j].second, g[j]});
    base += g.size() + 1;
  }
  auto mid = mat_mul_many(P, layer1);
  std::vector<std::pair<SMat, SMat>> layer2;
  base = 0;
  size_t mpos = 0;
  for (auto& g : groups) {
    for (size_t j = 0; j < g.size(); ++j) layer2.push_back({mid[mpos++], pairs[base + j + 1].first});
    base += g.size() + 1;
  }
  auto svals = mat_mul_many(P, layer2);
  auto pubs = reveal_mat_many(P, svals);
  // unblind: Y = R_0 (prod S_j) R_N^{-1}
  std::vector<std::pair<SMat, SMat>> fin;
  base = 0;
  mpos = 0;
  for (auto& g : groups) {
    PMat S = PMat::identity(dim);
    for (size_t j = 0; j < g.size(); ++j) S = S.mul(f, pubs[mpos++]);
    SMat left = mat_mul_public_right(P, pairs[base].first, S);
    fin.push_back({left, pairs[base + g.size()].second});
    base += g.size() + 1;
  }
  return mat_mul_many(P, fin);
}

SMat iterated_multiply(Party& P, const std::vector<SMat>& xs) {
  if (xs.empty()) return smat_from_public(P, PMat::identity(3));
  return iterated_multiply_many(P, {xs})[0];
}

// ---------------- formulas ----------------

namespace {
struct FParser {
  const std::string& s;
  size_t pos = 0;
  explicit FParser(const std::string& str) : s(str) {}
  void skip() { while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos; }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) { ++pos; return true; }
    return false;
  }
  Formula expr() {
    Formula acc = term();
    for (;;) {
      skip();
      if (eat('+')) {
        Formula r = term();
        Formula n;
        n.kind = Formula::Kind::Add;
        n.lhs = std::make_shared<Formula>(std::move(acc));
        n.rhs = std::make_shared<Formula>(std::move(r));
        acc = std::move(n);
      } else if (eat('-')) {
        Formula r = term();
        Formula n;
        n.kind = Formula::Kind::Sub;
        n.lhs = std::make_shared<Formula>(std::move(acc));
        n.rhs = std::make_shared<Formula>(std::move(r));
        acc = std::move(n);
      } else {
        return acc;
      }
    }
  }
  Formula term() {
    Formula acc = atom();
    for (;;) {
      skip();
      if (eat('*')) {
        Formula r = atom();
        Formula n;
        n.kind = Formula::Kind::Mul;
        n.lhs = std::make_shared<Formula>(std::move(acc));
        n.rhs = std::make_shared<Formula>(std::move(r));
        acc = std::move(n);
      } else {
        return acc;
      }
    }
  }
  Formula atom() {
    skip();
    if (eat('(')) {
      Formula e = expr();
      if (!eat(')')) throw std::invalid_argument("missing ')'");
      return e;
    }
    if (pos < s.size() && s[pos] == 'x') {
      ++pos;
      size_t start = pos;
      while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
      if (start == pos) throw std::invalid_argument("bad variable");
      Formula v;
      v.kind = Formula::Kind::Var;
      v.var = std::stoi(s.substr(start, pos - start));
      return v;
    }
    size_t start = pos;
    while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
    if (start == pos) throw std::invalid_argument("parse error at position " + std::to_string(pos));
    Formula c;
    c.kind = Formula::Kind::Const;
    c.value = std::stoull(s.substr(start, pos - start));
    return c;
  }
};
}  // namespace

Formula parse_formula(const std::string& text) {
  FParser p(text);
  Formula f = p.expr();
  p.skip();
  if (p.pos != text.size()) throw std::invalid_argument("trailing input in formula");
  return f;
}

std::string print_formula(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Var: return "x" + std::to_string(f.var);
    case Formula::Kind::Const: return std::to_string(f.value);
    case Formula::Kind::Add: return "(" + print_formula(*f.lhs) + " + " + print_formula(*f.rhs) + ")";
    case Formula::Kind::Sub: return "(" + print_formula(*f.lhs) + " - " + print_formula(*f.rhs) + ")";
    case Formula::Kind::Mul: return "(" + print_formula(*f.lhs) + " * " + print_formula(*f.rhs) + ")";
  }
  return "";
}

uint64_t eval_formula(const Field& f, const Formula& fm, const std::vector<uint64_t>& xs) {
  switch (fm.kind) {
    case Formula::Kind::Var:
      if (fm.var < 1 || size_t(fm.var) > xs.size()) throw std::out_of_range("variable index");
      return xs[fm.var - 1];
    case Formula::Kind::Const: return fm.value % f.order();
    case Formula::Kind::Add: return f.add(eval_formula(f, *fm.lhs, xs), eval_formula(f, *fm.rhs, xs));
    case Formula::Kind::Sub: return f.sub(eval_formula(f, *fm.lhs, xs), eval_formula(f, *fm.rhs, xs));
    case Formula::Kind::Mul: return f.mul(eval_formula(f, *fm.lhs, xs), eval_formula(f, *fm.rhs, xs));
  }
  return 0;
}

int formula_depth(const Formula& f) {
  if (f.kind == Formula::Kind::Var || f.kind == Formula::Kind::Const) return 0;
  return 1 + std::max(formula_depth(*f.lhs), formula_depth(*f.rhs));
}

namespace {

struct RawStep {
  int var = 0;  // 0 = constant
  uint64_t base[3][3] = {};
  uint64_t coef[3][3] = {};
};

RawStep const_step(const Field& f, std::initializer_list<std::initializer_list<int>> rows) {
  RawStep s;
  int r = 0;
  for (auto& row : rows) {
    int c = 0;
    for (int v : row) s.base[r][c++] = f.from_int(v);
    ++r;
  }
  return s;
}

RawStep leaf_step(const Field& f, const Formula& leaf) {
  RawStep s;
  for (int i = 0; i < 3; ++i) s.base[i][i] = 1;
  if (leaf.kind == Formula::Kind::Const)
    s.base[0][2] = leaf.value % f.order();
  else {
    s.var = leaf.var;
    s.coef[0][2] = 1;
  }
  return s;
}

void emit(const Field& f, const Formula& fm, std::vector<RawStep>& out, int& maxvar) {
  switch (fm.kind) {
    case Formula::Kind::Var:
      maxvar = std::max(maxvar, fm.var);
      [[fallthrough]];
    case Formula::Kind::Const:
      out.push_back(leaf_step(f, fm));
      return;
    case Formula::Kind::Add:
      emit(f, *fm.lhs, out, maxvar);
      emit(f, *fm.rhs, out, maxvar);
      return;
    case Formula::Kind::Sub: {
      // a - b = a + (-1)*b, but negation of a matrix program is just the
      // program for b with the top-right entries negated... only true for
      // single steps; rewrite via Mul with constant -1 for generality.
      Formula neg;
      neg.kind = Formula::Kind::Mul;
      Formula m1;
      m1.kind = Formula::Kind::Const;
      m1.value = f.neg(1);
      neg.lhs = std::make_shared<Formula>(m1);
      neg.rhs = fm.rhs;
      emit(f, *fm.lhs, out, maxvar);
      emit(f, neg, out, maxvar);
      return;
    }
    case Formula::Kind::Mul: {
      // M[fg] = J1 M[g] J2 M[f] J3 M[g] J4 M[f] J5
      out.push_back(const_step(f, {{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}}));
      emit(f, *fm.rhs, out, maxvar);
      out.push_back(const_step(f, {{0, 0, -1}, {1, 0, 0}, {0, 1, 0}}));
      emit(f, *fm.lhs, out, maxvar);
      out.push_back(const_step(f, {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
      emit(f, *fm.rhs, out, maxvar);
      out.push_back(const_step(f, {{0, 0, 1}, {-1, 0, 0}, {0, 1, 0}}));
      emit(f, *fm.lhs, out, maxvar);
      out.push_back(const_step(f, {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}}));
      return;
    }
  }
}

// base' + x coef' = C * (base + x coef)
RawStep left_mul_const(const Field& f, const uint64_t C[3][3], const RawStep& s) {
  RawStep r;
  r.var = s.var;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        r.base[i][j] = f.add(r.base[i][j], f.mul(C[i][k], s.base[k][j]));
        r.coef[i][j] = f.add(r.coef[i][j], f.mul(C[i][k], s.coef[k][j]));
      }
  return r;
}

RawStep right_mul_const(const Field& f, const RawStep& s, const uint64_t C[3][3]) {
  RawStep r;
  r.var = s.var;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        r.base[i][j] = f.add(r.base[i][j], f.mul(s.base[i][k], C[k][j]));
        r.coef[i][j] = f.add(r.coef[i][j], f.mul(s.coef[i][k], C[k][j]));
      }
  return r;
}

}  // namespace

MatrixProgram compile_formula(const Field& f, const Formula& fm) {
  std::vector<RawStep> raw;
  int maxvar = 0;
  emit(f, fm, raw, maxvar);
  // collapse runs of constant steps into the next variable step
  MatrixProgram mp;
  mp.nvars = maxvar;
  uint64_t C[3][3] = {};
  bool have_c = false;
  auto clear_c = [&] {
    for (auto& row : C) for (auto& v : row) v = 0;
    have_c = false;
  };
  clear_c();
  for (auto& s : raw) {
    if (s.var == 0) {
      if (!have_c) {
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) C[i][j] = s.base[i][j];
        have_c = true;
      } else {
        uint64_t N[3][3] = {};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) N[i][j] = f.add(N[i][j], f.mul(C[i][k], s.base[k][j]));
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) C[i][j] = N[i][j];
      }
      continue;
    }
    RawStep v = have_c ? left_mul_const(f, C, s) : s;
    clear_c();
    ProgStep ps;
    ps.var = v.var;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) { ps.base[i][j] = v.base[i][j]; ps.coef[i][j] = v.coef[i][j]; }
    mp.steps.push_back(ps);
  }
  if (have_c) {
    if (mp.steps.empty()) {
      ProgStep ps;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ps.base[i][j] = C[i][j];
      mp.steps.push_back(ps);
    } else {
      RawStep last;
      last.var = mp.steps.back().var;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          last.base[i][j] = mp.steps.back().base[i][j];
          last.coef[i][j] = mp.steps.back().coef[i][j];
        }
      RawStep merged = right_mul_const(f, last, C);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          mp.steps.back().base[i][j] = merged.base[i][j];
          mp.steps.back().coef[i][j] = merged.coef[i][j];
        }
    }
  }
  return mp;
}

uint64_t eval_program_plain(const Field& f, const MatrixProgram& mp,
                            const std::vector<uint64_t>& xs) {
  PMat acc = PMat::identity(3);
  for (auto& s : mp.steps) {
    PMat m{3, 3, std::vector<uint64_t>(9)};
    uint64_t xv = s.var ? xs.at(s.var - 1) : 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m.at(i, j) = f.add(s.base[i][j], f.mul(s.coef[i][j], xv));
    acc = acc.mul(f, m);
  }
  return acc.at(0, 2);
}

static std::vector<Secret> eval_const_many(Party& P,
                                           const std::vector<std::pair<const MatrixProgram*,
                                                                       const std::vector<Secret>*>>& jobs) {
  std::vector<std::vector<SMat>> groups;
  for (auto& [mp, xs] : jobs) {
    std::vector<SMat> g;
    for (auto& s : mp->steps) {
      SMat m{3, 3, std::vector<Secret>(9)};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          if (s.var == 0 || s.coef[i][j] == 0)
            m.at(i, j) = linear_combine(P, {}, s.base[i][j]);
          else
            m.at(i, j) = linear_combine(P, {{s.coef[i][j], xs->at(s.var - 1)}}, s.base[i][j]);
        }
      g.push_back(std::move(m));
    }
    groups.push_back(std::move(g));
  }
  auto prods = iterated_multiply_many(P, groups);
  std::vector<Secret> out;
  for (auto& m : prods) out.push_back(m.at(0, 2));
  return out;
}

Secret eval_const(Party& P, const MatrixProgram& mp, const std::vector<Secret>& xs) {
  return eval_const_many(P, {{&mp, &xs}})[0];
}

// ---------------- sliced circuit evaluation ----------------

std::vector<uint64_t> eval_sliced(Party& P, const third::Circuit& c,
                                  const std::vector<uint64_t>& my_inputs, int slice_depth) {
  using third::Circuit;
  using third::Gate;
  if (slice_depth < 1) throw std::invalid_argument("slice depth must be >= 1");
  const size_t step_guard = 3u * (1u << (2 * slice_depth)) + 2;

  // share all inputs (plain shares keep the round bookkeeping simple)
  std::vector<std::pair<int, uint64_t>> deals;
  size_t cursor = 0;
  const auto& in_layer = c.layers.at(0);
  for (size_t I = 0; I < in_layer.size(); ++I) {
    const Gate& g = in_layer[I];
    uint64_t v = 0;
    if (g.input_player == P.ctx.id && cursor < my_inputs.size()) v = my_inputs[cursor++];
    deals.push_back({g.input_player, v});
  }
  auto shared = share_plain_many(P, deals);
  std::vector<std::vector<Secret>> val(c.layers.size());
  val[0] = shared;

  int depth = c.depth();
  for (int lo = 0; lo < depth; lo += slice_depth) {
    int hi = std::min(lo + slice_depth, depth);
    // formulas for every gate in layers (lo, hi] over boundary variables
    std::map<std::pair<int, int>, int> varid;  // boundary gate -> 1-based var
    std::vector<Secret> vars;
    std::function<Formula(int, int)> build = [&](int L, int I) -> Formula {
      if (L <= lo) {
        auto key = std::make_pair(L, I);
        auto it = varid.find(key);
        if (it == varid.end()) {
          vars.push_back(val[L][I]);
          it = varid.emplace(key, int(vars.size())).first;
        }
        Formula v;
        v.kind = Formula::Kind::Var;
        v.var = it->second;
        return v;
      }
      const Gate& g = c.layers[L][I];
      if (g.kind == Gate::Kind::Mul) {
        Formula m;
        m.kind = Formula::Kind::Mul;
        m.lhs = std::make_shared<Formula>(build(g.ins[0].first, g.ins[0].second));
        m.rhs = std::make_shared<Formula>(build(g.ins[1].first, g.ins[1].second));
        return m;
      }
      Formula acc;
      acc.kind = Formula::Kind::Const;
      acc.value = g.consts[0];
      for (size_t k = 0; k < g.ins.size(); ++k) {
        Formula t;
        t.kind = Formula::Kind::Mul;
        Formula cst;
        cst.kind = Formula::Kind::Const;
        cst.value = g.consts[k + 1];
        t.lhs = std::make_shared<Formula>(cst);
        t.rhs = std::make_shared<Formula>(build(g.ins[k].first, g.ins[k].second));
        Formula add;
        add.kind = Formula::Kind::Add;
        add.lhs = std::make_shared<Formula>(std::move(acc));
        add.rhs = std::make_shared<Formula>(std::move(t));
        acc = std::move(add);
      }
      return acc;
    };

    std::vector<MatrixProgram> programs;
    std::vector<std::pair<int, int>> targets;
    for (int L = lo + 1; L <= hi; ++L)
      for (size_t I = 0; I < c.layers[L].size(); ++I) {
        Formula fm = build(L, int(I));
        MatrixProgram mp = compile_formula(P.f, fm);
        if (mp.steps.size() > step_guard)
          throw std::length_error("slice program exceeds 4^s guard; lower slice_depth");
        programs.push_back(std::move(mp));
        targets.push_back({L, int(I)});
      }
    std::vector<std::pair<const MatrixProgram*, const std::vector<Secret>*>> jobs;
    for (auto& mp : programs) jobs.push_back({&mp, &vars});
    auto results = eval_const_many(P, jobs);
    for (size_t k = 0; k < targets.size(); ++k) {
      auto [L, I] = targets[k];
      if (int(val[L].size()) <= I) val[L].resize(I + 1);
      val[L][I] = results[k];
    }
  }

  std::vector<Secret> outs;
  for (auto& [L, I] : c.outs) outs.push_back(val[L][I]);
  return reveal_many(P, outs);
}

// ---------------- canonical polynomials ----------------

uint64_t MultiPoly::eval(const Field& f, const std::vector<uint64_t>& xs) const {
  uint64_t acc = 0;
  for (auto& [mask, coef] : terms) {
    uint64_t t = coef;
    for (int i = 0; i < nvars; ++i)
      if (mask >> i & 1) t = f.mul(t, xs.at(i));
    acc = f.add(acc, t);
  }
  return acc;
}

int MultiPoly::degree() const {
  int d = 0;
  for (auto& [mask, coef] : terms)
    if (coef) d = std::max(d, __builtin_popcount(mask));
  return d;
}

MultiPoly canonical_poly(const Field& f, const std::function<uint64_t(uint32_t)>& F, int nvars) {
  MultiPoly p;
  p.nvars = nvars;
  for (uint32_t eps = 0; eps < (1u << nvars); ++eps) {
    uint64_t val = F(eps) % f.order();
    if (val == 0) continue;
    // expand prod_i [eps_i ? x_i : (1 - x_i)]
    std::map<uint32_t, uint64_t> acc{{0, val}};
    for (int i = 0; i < nvars; ++i) {
      std::map<uint32_t, uint64_t> next;
      for (auto& [mask, coef] : acc) {
        if (eps >> i & 1) {
          next[mask | (1u << i)] = f.add(next[mask | (1u << i)], coef);
        } else {
          next[mask] = f.add(next[mask], coef);
          next[mask | (1u << i)] = f.sub(next[mask | (1u << i)], coef);
        }
      }
      acc = std::move(next);
    }
    for (auto& [mask, coef] : acc) {
      p.terms[mask] = f.add(p.terms[mask], coef);
      if (p.terms[mask] == 0) p.terms.erase(mask);
    }
  }
  return p;
}

}  // namespace mpcw::cr
