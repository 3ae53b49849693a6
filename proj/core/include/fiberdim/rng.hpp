#pragma once

#include <cstdint>

namespace fiberdim {

// Counter-based keyed generator built on the SplitMix64 finalizer. Every draw
// is a pure function of (seed, key dims), so parallel and serial sampling
// agree bit-exactly and streams never share state.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t keyed_u64(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return h;
}

inline double unit_double(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

struct RngStream {
  uint64_t key;
  uint64_t ctr = 0;

  explicit RngStream(uint64_t seed, uint64_t tag0 = 0, uint64_t tag1 = 0)
      : key(keyed_u64(seed, tag0, tag1, 0x243f6a8885a308d3ULL)) {}

  uint64_t next() { return mix64(key ^ mix64(ctr++)); }
  double unit() { return unit_double(next()); }

  // Multiply-shift range reduction: deterministic across platforms, bias
  // below 2^-64 * n which is irrelevant at Monte Carlo scale.
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }
};

}  // namespace fiberdim
