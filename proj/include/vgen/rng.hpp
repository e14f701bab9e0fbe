#pragma once

#include <cstdint>

namespace vgen {

// splitmix64 finalizer.  Used both as the per-draw generator step and as
// the reseeding function, so results are identical across platforms and
// standard libraries -- the distribution machinery in <random> is
// implementation-defined and would break byte-for-byte reproducibility.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives the replacement seed when a candidate design is discarded
// (depth blowout, unresolvable name, type conflict).  Pure; no fixed
// points on the ranges we exercise.
inline uint64_t next_seed(uint64_t seed) { return mix64(seed); }

// Deterministic stream generator.
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() { return mix64(state_++); }

  // Uniform in [0, 1) with 53 significant bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n); n must be positive.  Multiply-shift keeps the map
  // platform-stable (bias at 2^-64 is irrelevant here).
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  bool chance(double p) { return next_double() < p; }

private:
  uint64_t state_;
};

}  // namespace vgen
