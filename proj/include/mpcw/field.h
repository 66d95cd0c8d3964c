#pragma once
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpcw {

// Finite field description: prime fields with p <= 2^61 (residues in uint64_t)
// or binary extension fields GF(2^k), k <= 32, via an irreducible polynomial
// bitmask that includes the leading x^k bit.
struct FieldSpec {
  enum class Kind { Prime, Binary };
  Kind kind = Kind::Prime;
  uint64_t modulus = 2;  // prime p, or irreducible mask for binary fields
  unsigned degree = 0;   // k for GF(2^k), 0 for prime fields

  static FieldSpec prime(uint64_t p);
  static FieldSpec binary(unsigned k);                  // stock irreducibles for k in {1..32}
  static FieldSpec binary_with_mask(unsigned k, uint64_t mask);

  uint64_t order() const { return kind == Kind::Prime ? modulus : (uint64_t(1) << degree); }
  bool operator==(const FieldSpec& o) const {
    return kind == o.kind && modulus == o.modulus && degree == o.degree;
  }
  std::string name() const;
};

class Field {
 public:
  explicit Field(FieldSpec s) : spec_(s) {}
  const FieldSpec& spec() const { return spec_; }
  uint64_t order() const { return spec_.order(); }
  uint64_t characteristic() const { return spec_.kind == FieldSpec::Kind::Prime ? spec_.modulus : 2; }

  uint64_t add(uint64_t a, uint64_t b) const;
  uint64_t sub(uint64_t a, uint64_t b) const;
  uint64_t neg(uint64_t a) const;
  uint64_t mul(uint64_t a, uint64_t b) const;
  uint64_t inv(uint64_t a) const;  // throws std::domain_error on 0
  uint64_t div(uint64_t a, uint64_t b) const { return mul(a, inv(b)); }
  uint64_t pow(uint64_t a, uint64_t e) const;
  uint64_t from_int(int64_t v) const;  // reduce a signed integer into the field
  bool same(const Field& o) const { return spec_ == o.spec_; }

 private:
  FieldSpec spec_;
};

// A field element tagged with its field; mixed-field arithmetic throws.
struct FE {
  const Field* f = nullptr;
  uint64_t v = 0;

  FE() = default;
  FE(const Field& fld, uint64_t val) : f(&fld), v(val) {}

  FE operator+(FE o) const { chk(o); return FE(*f, f->add(v, o.v)); }
  FE operator-(FE o) const { chk(o); return FE(*f, f->sub(v, o.v)); }
  FE operator*(FE o) const { chk(o); return FE(*f, f->mul(v, o.v)); }
  FE operator-() const { return FE(*f, f->neg(v)); }
  FE inv() const { return FE(*f, f->inv(v)); }
  bool operator==(FE o) const { chk(o); return v == o.v; }
  bool operator!=(FE o) const { return !(*this == o); }
  bool is_zero() const { return v == 0; }

 private:
  void chk(const FE& o) const {
    if (!f || !o.f || !f->same(*o.f)) throw std::invalid_argument("mixed-field operation");
  }
};

// Dense univariate polynomial, coefficients low-degree-first, normalized
// (no trailing zero coefficients; the zero polynomial has empty coeffs).
class Poly {
 public:
  Poly() = default;
  Poly(const Field& f, std::vector<uint64_t> coeffs) : f_(&f), c_(std::move(coeffs)) { normalize(); }
  static Poly zero(const Field& f) { return Poly(f, {}); }
  static Poly constant(const Field& f, uint64_t v) { return Poly(f, {v}); }

  const Field& field() const { return *f_; }
  const std::vector<uint64_t>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return int(c_.size()) - 1; }  // -1 for the zero polynomial
  uint64_t coeff(size_t i) const { return i < c_.size() ? c_[i] : 0; }

  uint64_t eval(uint64_t x) const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly scale(uint64_t k) const;
  Poly truncated(size_t max_degree) const;  // mod x^(max_degree+1)
  // Quotient and remainder; divisor must be nonzero.
  std::pair<Poly, Poly> divmod(const Poly& d) const;

 private:
  const Field* f_ = nullptr;
  std::vector<uint64_t> c_;
  void normalize() { while (!c_.empty() && c_.back() == 0) c_.pop_back(); }
};

// Unique interpolating polynomial of degree < points.size() through distinct xs.
Poly lagrange_interpolate(const Field& f, const std::vector<std::pair<uint64_t, uint64_t>>& points);

// Lagrange basis coefficient L_i(x) for node set xs, evaluated at x.
uint64_t lagrange_coeff(const Field& f, const std::vector<uint64_t>& xs, size_t i, uint64_t x);

// Decode a degree <= d polynomial from n points with at most e wrong values
// (Berlekamp-Welch). Needs n >= d + 1 + 2e. Returns nullopt when no degree-d
// polynomial agrees with at least n-e of the points.
std::optional<Poly> decode_with_errors(const Field& f,
                                       const std::vector<std::pair<uint64_t, uint64_t>>& points,
                                       int d, int e);

// Solve M x = rhs over f by Gaussian elimination; free variables are set to 0.
// Returns nullopt when the system is inconsistent.
std::optional<std::vector<uint64_t>> solve_linear(const Field& f,
                                                  std::vector<std::vector<uint64_t>> M,
                                                  std::vector<uint64_t> rhs);

}  // namespace mpcw
