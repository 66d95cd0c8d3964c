#include "mpcw/field.h"

namespace mpcw {

static bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

FieldSpec FieldSpec::prime(uint64_t p) {
  if (p > (uint64_t(1) << 61)) throw std::invalid_argument("prime modulus exceeds 2^61");
  // trial division is only affordable for small moduli; large ones are trusted
  if (p <= (uint64_t(1) << 20) && !is_prime_u64(p))
    throw std::invalid_argument("modulus is not prime");
  FieldSpec s;
  s.kind = Kind::Prime;
  s.modulus = p;
  s.degree = 0;
  return s;
}

FieldSpec FieldSpec::binary(unsigned k) {
  // Irreducible polynomials, low-weight choices; masks include the x^k term.
  static const struct { unsigned k; uint64_t mask; } table[] = {
      {1, 0b10},                 // x
      {2, 0b111},                // x^2+x+1
      {3, 0b1011},               // x^3+x+1
      {4, 0b10011},              // x^4+x+1
      {8, 0x11D},                // x^8+x^4+x^3+x^2+1
      {16, 0x1100B},             // x^16+x^12+x^3+x+1
  };
  // x^32 + x^22 + x^2 + x + 1
  if (k == 32) return binary_with_mask(32, (uint64_t(1) << 32) | (uint64_t(1) << 22) | 0b111);
  for (auto& row : table)
    if (row.k == k) return binary_with_mask(k, row.mask);
  throw std::invalid_argument("no stock irreducible for GF(2^k) with this k");
}

FieldSpec FieldSpec::binary_with_mask(unsigned k, uint64_t mask) {
  if (k == 0 || k > 32) throw std::invalid_argument("binary field degree out of range");
  if ((mask >> k) != 1) throw std::invalid_argument("mask must have degree k");
  FieldSpec s;
  s.kind = Kind::Binary;
  s.modulus = mask;
  s.degree = k;
  return s;
}

std::string FieldSpec::name() const {
  if (kind == Kind::Prime) return "GF(" + std::to_string(modulus) + ")";
  return "GF(2^" + std::to_string(degree) + ")";
}

uint64_t Field::add(uint64_t a, uint64_t b) const {
  if (spec_.kind == FieldSpec::Kind::Binary) return a ^ b;
  uint64_t s = a + b;
  if (s >= spec_.modulus) s -= spec_.modulus;
  return s;
}

uint64_t Field::sub(uint64_t a, uint64_t b) const {
  if (spec_.kind == FieldSpec::Kind::Binary) return a ^ b;
  return a >= b ? a - b : a + spec_.modulus - b;
}

uint64_t Field::neg(uint64_t a) const {
  if (spec_.kind == FieldSpec::Kind::Binary) return a;
  return a == 0 ? 0 : spec_.modulus - a;
}

uint64_t Field::mul(uint64_t a, uint64_t b) const {
  if (spec_.kind == FieldSpec::Kind::Prime)
    return uint64_t((__uint128_t)a * b % spec_.modulus);
  // carry-less multiply then reduce; operands are < 2^32 so the product fits.
  uint64_t acc = 0;
  uint64_t x = a;
  for (uint64_t y = b; y; y >>= 1, x <<= 1)
    if (y & 1) acc ^= x;
  unsigned k = spec_.degree;
  for (int bit = int(2 * k) - 2; bit >= int(k); --bit)
    if (acc >> bit & 1) acc ^= spec_.modulus << (bit - k);
  return acc;
}

uint64_t Field::pow(uint64_t a, uint64_t e) const {
  uint64_t r = 1;
  uint64_t base = a;
  while (e) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

uint64_t Field::inv(uint64_t a) const {
  if (a == 0) throw std::domain_error("inverse of zero");
  return pow(a, order() - 2);
}

uint64_t Field::from_int(int64_t v) const {
  if (spec_.kind == FieldSpec::Kind::Binary) {
    uint64_t mask = (spec_.degree == 64) ? ~uint64_t(0) : ((uint64_t(1) << spec_.degree) - 1);
    // integers map through their parity-preserving residue: reduce mod 2 semantics
    // are only meaningful for 0/1/-1 style constants, so reduce bitwise.
    uint64_t u = uint64_t(v < 0 ? -v : v) & mask;
    return u;
  }
  int64_t m = int64_t(spec_.modulus);
  int64_t r = v % m;
  if (r < 0) r += m;
  return uint64_t(r);
}

uint64_t Poly::eval(uint64_t x) const {
  if (!f_) throw std::logic_error("empty polynomial");
  uint64_t acc = 0;
  for (size_t i = c_.size(); i-- > 0;) acc = f_->add(f_->mul(acc, x), c_[i]);
  return acc;
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<uint64_t> r(std::max(c_.size(), o.c_.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) r[i] = f_->add(coeff(i), o.coeff(i));
  return Poly(*f_, std::move(r));
}

Poly Poly::operator-(const Poly& o) const {
  std::vector<uint64_t> r(std::max(c_.size(), o.c_.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) r[i] = f_->sub(coeff(i), o.coeff(i));
  return Poly(*f_, std::move(r));
}

Poly Poly::operator*(const Poly& o) const {
  if (is_zero() || o.is_zero()) return Poly(*f_, {});
  std::vector<uint64_t> r(c_.size() + o.c_.size() - 1, 0);
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j)
      r[i + j] = f_->add(r[i + j], f_->mul(c_[i], o.c_[j]));
  return Poly(*f_, std::move(r));
}

Poly Poly::scale(uint64_t k) const {
  std::vector<uint64_t> r(c_);
  for (auto& x : r) x = f_->mul(x, k);
  return Poly(*f_, std::move(r));
}

Poly Poly::truncated(size_t max_degree) const {
  std::vector<uint64_t> r(c_.begin(), c_.begin() + std::min(c_.size(), max_degree + 1));
  return Poly(*f_, std::move(r));
}

std::pair<Poly, Poly> Poly::divmod(const Poly& d) const {
  if (d.is_zero()) throw std::domain_error("division by zero polynomial");
  std::vector<uint64_t> rem(c_);
  std::vector<uint64_t> quo;
  int dd = d.degree();
  uint64_t lead_inv = f_->inv(d.c_.back());
  if (int(rem.size()) - 1 >= dd) quo.assign(rem.size() - dd, 0);
  for (int i = int(rem.size()) - 1; i >= dd; --i) {
    uint64_t q = f_->mul(rem[i], lead_inv);
    quo[i - dd] = q;
    if (q == 0) continue;
    for (int j = 0; j <= dd; ++j)
      rem[i - dd + j] = f_->sub(rem[i - dd + j], f_->mul(q, d.c_[j]));
  }
  return {Poly(*f_, std::move(quo)), Poly(*f_, std::move(rem))};
}

uint64_t lagrange_coeff(const Field& f, const std::vector<uint64_t>& xs, size_t i, uint64_t x) {
  uint64_t num = 1, den = 1;
  for (size_t j = 0; j < xs.size(); ++j) {
    if (j == i) continue;
    num = f.mul(num, f.sub(x, xs[j]));
    den = f.mul(den, f.sub(xs[i], xs[j]));
  }
  return f.mul(num, f.inv(den));
}

Poly lagrange_interpolate(const Field& f,
                          const std::vector<std::pair<uint64_t, uint64_t>>& points) {
  Poly acc = Poly::zero(f);
  for (size_t i = 0; i < points.size(); ++i) {
    Poly basis = Poly::constant(f, 1);
    uint64_t den = 1;
    for (size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      basis = basis * Poly(f, {f.neg(points[j].first), 1});
      den = f.mul(den, f.sub(points[i].first, points[j].first));
    }
    acc = acc + basis.scale(f.mul(points[i].second, f.inv(den)));
  }
  return acc;
}

std::optional<std::vector<uint64_t>> solve_linear(const Field& f,
                                                  std::vector<std::vector<uint64_t>> M,
                                                  std::vector<uint64_t> rhs) {
  size_t rows = M.size();
  size_t cols = rows ? M[0].size() : 0;
  std::vector<int> pivot_col_of_row;
  size_t r = 0;
  std::vector<int> where(cols, -1);
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t sel = r;
    while (sel < rows && M[sel][c] == 0) ++sel;
    if (sel == rows) continue;
    std::swap(M[sel], M[r]);
    std::swap(rhs[sel], rhs[r]);
    uint64_t piv_inv = f.inv(M[r][c]);
    for (size_t j = c; j < cols; ++j) M[r][j] = f.mul(M[r][j], piv_inv);
    rhs[r] = f.mul(rhs[r], piv_inv);
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || M[i][c] == 0) continue;
      uint64_t factor = M[i][c];
      for (size_t j = c; j < cols; ++j) M[i][j] = f.sub(M[i][j], f.mul(factor, M[r][j]));
      rhs[i] = f.sub(rhs[i], f.mul(factor, rhs[r]));
    }
    where[c] = int(r);
    ++r;
  }
  for (size_t i = r; i < rows; ++i)
    if (rhs[i] != 0) return std::nullopt;
  std::vector<uint64_t> x(cols, 0);
  for (size_t c = 0; c < cols; ++c)
    if (where[c] >= 0) x[c] = rhs[where[c]];
  return x;
}

std::optional<Poly> decode_with_errors(const Field& f,
                                       const std::vector<std::pair<uint64_t, uint64_t>>& points,
                                       int d, int e) {
  int n = int(points.size());
  if (e < 0 || n < d + 1 + 2 * e) throw std::invalid_argument("too few points for decoding radius");
  {
    // error-free fast path: the first d+1 points fix the candidate; accept
    // it when every point agrees, skipping the error-locator solve
    std::vector<std::pair<uint64_t, uint64_t>> head(points.begin(), points.begin() + d + 1);
    Poly cand = lagrange_interpolate(f, head);
    bool all = true;
    for (auto& [x, y] : points)
      if (cand.eval(x) != y) { all = false; break; }
    if (all) return cand;
  }
  for (int et = e; et >= 0; --et) {
    // Unknowns: Q (degree <= d+et, d+et+1 coeffs) and E (monic degree et, et coeffs).
    // Constraint per point: Q(x) - y*E(x) = 0 with E = x^et + sum_{l<et} E_l x^l.
    int nq = d + et + 1;
    std::vector<std::vector<uint64_t>> M(n, std::vector<uint64_t>(nq + et, 0));
    std::vector<uint64_t> rhs(n, 0);
    for (int i = 0; i < n; ++i) {
      uint64_t x = points[i].first, y = points[i].second;
      uint64_t xp = 1;
      for (int l = 0; l < nq; ++l) { M[i][l] = xp; xp = f.mul(xp, x); }
      xp = 1;
      for (int l = 0; l < et; ++l) { M[i][nq + l] = f.neg(f.mul(y, xp)); xp = f.mul(xp, x); }
      rhs[i] = f.mul(y, f.pow(x, uint64_t(et)));
    }
    auto sol = solve_linear(f, M, rhs);
    if (!sol) continue;
    std::vector<uint64_t> qc(sol->begin(), sol->begin() + nq);
    std::vector<uint64_t> ec(sol->begin() + nq, sol->end());
    ec.push_back(1);  // monic
    Poly Q(f, std::move(qc)), E(f, std::move(ec));
    auto [P, rem] = Q.divmod(E);
    if (!rem.is_zero() || P.degree() > d) continue;
    int agree = 0;
    for (auto& [x, y] : points)
      if (P.eval(x) == y) ++agree;
    if (agree >= n - e) return P;
  }
  return std::nullopt;
}

}  // namespace mpcw
