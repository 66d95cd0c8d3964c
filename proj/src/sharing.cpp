#include "mpcw/sharing.h"

namespace mpcw {

ShareSet shamir_share(const Field& f, uint64_t s, int t, int n, Rng& rng) {
  if (n < t + 1) throw std::invalid_argument("need n >= t+1");
  if (uint64_t(n) >= f.order()) throw std::invalid_argument("field too small for n players");
  std::vector<uint64_t> coeffs(t + 1);
  coeffs[0] = s;
  for (int j = 1; j <= t; ++j) coeffs[j] = rng.fe(f);
  Poly p(f, std::move(coeffs));
  ShareSet out;
  out.scheme = Scheme::Shamir;
  out.t = t;
  out.n = n;
  for (int i = 1; i <= n; ++i) out.pieces[i] = p.eval(eval_point(f, i));
  return out;
}

std::optional<uint64_t> shamir_reconstruct(const Field& f, const ShareSet& shares, bool robust) {
  std::vector<std::pair<uint64_t, uint64_t>> pts;
  for (auto& [i, v] : shares.pieces) pts.push_back({eval_point(f, i), v});
  int m = int(pts.size());
  if (m < shares.t + 1) return std::nullopt;
  if (!robust) {
    pts.resize(shares.t + 1);
    return lagrange_interpolate(f, pts).eval(0);
  }
  int e = (m - shares.t - 1) / 2;
  auto p = decode_with_errors(f, pts, shares.t, e);
  if (!p) return std::nullopt;
  return p->eval(0);
}

ShareSet sum_share(const Field& f, uint64_t s, int n, Rng& rng) {
  ShareSet out;
  out.scheme = Scheme::Sum;
  out.t = n - 1;
  out.n = n;
  uint64_t acc = 0;
  for (int i = 1; i < n; ++i) {
    uint64_t r = rng.fe(f);
    out.pieces[i] = r;
    acc = f.add(acc, r);
  }
  out.pieces[n] = f.sub(s, acc);
  return out;
}

uint64_t sum_reconstruct(const Field& f, const ShareSet& shares) {
  uint64_t acc = 0;
  for (auto& [i, v] : shares.pieces) acc = f.add(acc, v);
  return acc;
}

}  // namespace mpcw
