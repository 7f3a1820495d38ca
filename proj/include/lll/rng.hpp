#pragma once

#include <cstdint>
#include <random>

#include "lll/rational.hpp"

namespace lll {

// splitmix64 finalizer; used to derive independent stream seeds from labels.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic random source. std::mt19937_64 has a portable output
// sequence, and every distribution draw below is implemented from raw words
// (no std::uniform_* distributions, whose mappings vary across standard
// libraries). Draw counts are tracked so a stream can be replayed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Replay support: reconstruct a stream that has already emitted `pos` words.
  Rng(uint64_t seed, uint64_t pos) : engine_(seed) {
    engine_.discard(pos);
    words_ = pos;
  }

  uint64_t next_word() {
    ++words_;
    return engine_();
  }

  // One fair bit, buffered from whole words.
  bool next_bit() {
    if (buffered_ == 0) {
      buffer_ = next_word();
      buffered_ = 64;
    }
    bool b = buffer_ & 1;
    buffer_ >>= 1;
    --buffered_;
    ++bits_;
    return b;
  }

  // Uniform integer in [0, n), n >= 1, by rejection on the top bits.
  uint64_t below(uint64_t n) {
    if (n == 0) throw InvariantViolation("Rng::below requires n >= 1");
    if (n == 1) return 0;
    int bits = 64 - __builtin_clzll(n - 1);
    for (;;) {
      uint64_t r = 0;
      for (int i = 0; i < bits; ++i) r = (r << 1) | (next_bit() ? 1u : 0u);
      if (r < n) return r;
    }
  }

  // Uniform big integer in [0, n), n >= 1.
  Integer below(const Integer& n) {
    if (n <= 0) throw InvariantViolation("Rng::below requires n >= 1");
    if (n == 1) return 0;
    Integer top = n - 1;
    size_t bits = mpz_sizeinbase(top.get_mpz_t(), 2);
    for (;;) {
      Integer r = 0;
      for (size_t i = 0; i < bits; ++i) {
        r <<= 1;
        if (next_bit()) r |= 1;
      }
      if (r < n) return r;
    }
  }

  uint64_t words_consumed() const { return words_; }
  uint64_t bits_consumed() const { return bits_; }

 private:
  std::mt19937_64 engine_;
  uint64_t buffer_ = 0;
  int buffered_ = 0;
  uint64_t words_ = 0;
  uint64_t bits_ = 0;
};

}  // namespace lll
