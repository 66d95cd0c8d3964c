#pragma once
#include <cstdint>

#include "mpcw/field.h"

namespace mpcw {

// Deterministic splitmix64 stream. Every randomized routine takes one of
// these (or a seed) so that runs are reproducible bit-for-bit; per-player
// tapes are derived from a master seed with a counter construction.
struct Rng {
  uint64_t s = 0;
  explicit Rng(uint64_t seed) : s(seed) {}

  uint64_t next() {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) by rejection.
  uint64_t below(uint64_t n) {
    uint64_t lim = ~uint64_t(0) - ~uint64_t(0) % n;
    uint64_t x;
    do { x = next(); } while (x >= lim);
    return x % n;
  }

  uint64_t fe(const Field& f) { return below(f.order()); }
  uint64_t nonzero_fe(const Field& f) { return 1 + below(f.order() - 1); }
  bool bit() { return next() & 1; }

  static Rng derive(uint64_t master, uint64_t stream) {
    Rng mix(master ^ (0xd1342543de82ef95ULL * (stream + 1)));
    uint64_t s0 = mix.next();
    return Rng(s0);
  }
};

}  // namespace mpcw
