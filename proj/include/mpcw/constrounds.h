#pragma once
#include <memory>

#include "mpcw/mpc_third.h"

namespace mpcw::cr {

using third::Party;
using third::Secret;

// Shared matrix: row-major entries, each a degree-t sharing.
struct SMat {
  int nr = 0, nc = 0;
  std::vector<Secret> e;
  Secret& at(int r, int c) { return e[r * nc + c]; }
  const Secret& at(int r, int c) const { return e[r * nc + c]; }
};

// Public matrix helper.
struct PMat {
  int nr = 0, nc = 0;
  std::vector<uint64_t> e;
  uint64_t& at(int r, int c) { return e[r * nc + c]; }
  uint64_t at(int r, int c) const { return e[r * nc + c]; }
  static PMat identity(int d);
  PMat mul(const Field& f, const PMat& o) const;
  uint64_t det(const Field& f) const;  // Gaussian elimination
  std::optional<PMat> inv(const Field& f) const;
};

SMat smat_from_public(Party& P, const PMat& m);
// One batched multiply layer per call; all matrix products in `pairs` share it.
std::vector<SMat> mat_mul_many(Party& P, const std::vector<std::pair<SMat, SMat>>& pairs);
SMat mat_mul(Party& P, const SMat& a, const SMat& b);
SMat mat_mul_public_left(Party& P, const PMat& a, const SMat& b);    // local
SMat mat_mul_public_right(Party& P, const SMat& a, const PMat& b);   // local
PMat reveal_mat(Party& P, const SMat& m);
std::vector<PMat> reveal_mat_many(Party& P, const std::vector<SMat>& ms);

// Group inverse of a nonzero secret: blind, reveal V=RX, unblind.
// Retries while the revealed blinding is zero (geometric).
Secret invert_group_secret(Party& P, const Secret& X);

// Extended field inverse (0 -> 0) in constant rounds per batch; batches of
// `batch` random pairs are consumed until one matches X.
Secret invert_field_secret(Party& P, const Secret& X, int batch = 16);

// Secret 3x3 inverse by the adjugate/determinant circuit (requires the
// matrix be invertible).
SMat mat_inv3(Party& P, const SMat& m);
// General inverse by blinding with a random full-rank matrix.
SMat mat_inv_general(Party& P, const SMat& m);

// Random full-rank secret matrices together with their secret inverses.
// All slots are produced in one constant-round batch; `attempts` candidate
// pairs are drawn per slot and the first invertible one is kept.
std::vector<std::pair<SMat, SMat>> random_full_rank_many(Party& P, int dim, int count,
                                                         int attempts = 12);
std::pair<SMat, SMat> random_full_rank(Party& P, int dim);

// Product X_1 * ... * X_N of invertible secret matrices, constant rounds
// independent of N (IM1..IM6).
SMat iterated_multiply(Party& P, const std::vector<SMat>& xs);

// ---- algebraic formulas ----
//
// Grammar: expr := term (('+'|'-') term)* ; term := atom ('*' atom)* ;
// atom := 'x'<index> | <integer constant> | '(' expr ')'.
struct Formula {
  enum class Kind { Var, Const, Add, Sub, Mul };
  Kind kind = Kind::Const;
  int var = 0;          // 1-based for Var
  uint64_t value = 0;   // for Const
  std::shared_ptr<Formula> lhs, rhs;
};
Formula parse_formula(const std::string& text);
std::string print_formula(const Formula& f);
uint64_t eval_formula(const Field& f, const Formula& fm, const std::vector<uint64_t>& xs);
int formula_depth(const Formula& f);

// A width-3 matrix program: each step is a 3x3 matrix whose entries are
// affine in at most one input variable (var = 0 for all-constant steps).
// The product of all steps carries the formula value in entry (1,3).
struct ProgStep {
  int var = 0;  // 0 = constant step
  // entry (r,c) = base[r][c] + coef[r][c] * x_var
  uint64_t base[3][3] = {};
  uint64_t coef[3][3] = {};
};
struct MatrixProgram {
  int nvars = 0;
  std::vector<ProgStep> steps;
};
// Ben-Or--Cleve compilation with constant-run collapsing: the emitted
// program alternates variable-bearing steps (no two adjacent constants).
MatrixProgram compile_formula(const Field& f, const Formula& fm);
uint64_t eval_program_plain(const Field& f, const MatrixProgram& mp, const std::vector<uint64_t>& xs);

// Evaluate a compiled program on shared inputs in constant rounds
// (independent of program length); result stays shared.
Secret eval_const(Party& P, const MatrixProgram& mp, const std::vector<Secret>& xs);

// Evaluate a layered circuit slice-by-slice: each slice of depth <= s is
// converted to per-output formulas (size guard: <= 4^s leaf bound applies)
// and run through eval_const, keeping intermediate values shared.
std::vector<uint64_t> eval_sliced(Party& P, const third::Circuit& c,
                                  const std::vector<uint64_t>& my_inputs, int slice_depth);

// ---- canonical multilinear polynomials ----
struct MultiPoly {
  int nvars = 0;
  std::map<uint32_t, uint64_t> terms;  // monomial bitmask -> coefficient
  uint64_t eval(const Field& f, const std::vector<uint64_t>& xs) const;
  int degree() const;
};
// c_F(x) = sum_eps F(eps) prod_i x_i^eps(i) (1-x_i)^(1-eps(i)): the unique
// multilinear polynomial agreeing with F on {0,1}^n.
MultiPoly canonical_poly(const Field& f, const std::function<uint64_t(uint32_t)>& F, int nvars);

// delta(x) = 1 - norm(x) style equality indicator is built by callers from
// the extended inverse; provided here for boolean tables.

}  // namespace mpcw::cr
