#pragma once

#include <cstdint>

namespace repqkd {

// Counter-based deterministic generator. Output word i is
// splitmix64_mix(key + (i+1) * GAMMA), so a (seed, stream) pair fully
// determines the sequence and any draw can be recomputed from its index.
// Identical seeds produce identical streams on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1))) {}

  std::uint64_t next_u64() {
    counter_ += 1;
    return mix(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform in [0, n). Plain modular reduction; the bias of at most
  // n / 2^64 is irrelevant at simulation moduli and keeps the stream
  // reproducible from the documented formula alone.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double prob) { return next_unit() < prob; }

  std::uint64_t draws() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace repqkd
