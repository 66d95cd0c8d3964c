#pragma once
#include <map>

#include "mpcw/field.h"
#include "mpcw/rng.h"

namespace mpcw {

// Default evaluation point for player i (1-based): alpha_i = i.
inline uint64_t eval_point(const Field& f, int i) { return f.from_int(i); }

enum class Scheme { Shamir, Sum };

// Pieces of one shared secret; keys are 1-based player indices.
struct ShareSet {
  Scheme scheme = Scheme::Shamir;
  int t = 0;
  int n = 0;
  std::map<int, uint64_t> pieces;
};

// Shamir sharing: uniform polynomial of degree <= t with free term s,
// piece i = p(alpha_i).
ShareSet shamir_share(const Field& f, uint64_t s, int t, int n, Rng& rng);

// Interpolate the secret from any >= t+1 pieces. With robust=true, decodes
// through up to floor((m - t - 1)/2) wrong pieces among the m provided.
std::optional<uint64_t> shamir_reconstruct(const Field& f, const ShareSet& shares, bool robust);

// Sum sharing: n uniform pieces with sum s; all n are needed to reconstruct.
ShareSet sum_share(const Field& f, uint64_t s, int n, Rng& rng);
uint64_t sum_reconstruct(const Field& f, const ShareSet& shares);

}  // namespace mpcw
