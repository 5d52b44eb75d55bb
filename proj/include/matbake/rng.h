// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace matbake {

// PCG32. Streams are derived from (seed, key) pairs so every pixel/sample
// gets an independent, order-free generator.
class Rng {
 public:
  Rng() { seed(0, 0); }
  Rng(uint64_t initstate, uint64_t initseq) { seed(initstate, initseq); }

  void seed(uint64_t initstate, uint64_t initseq) {
    state_ = 0u;
    inc_ = (initseq << 1u) | 1u;
    next_u32();
    state_ += initstate;
    next_u32();
  }

  uint32_t next_u32() {
    uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
    uint32_t rot = static_cast<uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31));
  }

  // Uniform in [0, 1).
  float next_float() { return (next_u32() >> 8) * 0x1p-24f; }

  double next_double() { return next_u32() * 0x1p-32; }

  // Uniform integer in [0, n).
  uint32_t next_below(uint32_t n) {
    return static_cast<uint32_t>((uint64_t(next_u32()) * n) >> 32);
  }

 private:
  uint64_t state_ = 0;
  uint64_t inc_ = 0;
};

// splitmix64; used to hash (seed, pixel, sample, salt) tuples into stream keys.
inline uint64_t hash_u64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
  return hash_u64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

inline Rng make_stream(uint64_t seed, uint64_t key_a, uint64_t key_b, uint64_t salt) {
  uint64_t h = hash_combine(hash_combine(seed, key_a), hash_combine(key_b, salt));
  return Rng(h, hash_u64(h));
}

}  // namespace matbake
