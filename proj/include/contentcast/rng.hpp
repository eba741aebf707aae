#pragma once

#include <cstdint>

namespace contentcast {

// SplitMix64 (Steele/Lea/Vigna). The project's single PRNG: every randomized
// path is a pure function of a 64-bit seed and this generator, so traces and
// sweeps are reproducible byte-for-byte given the seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 bits of resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, hi]: never zero, so times stay strictly positive.
  double uniform_open0(double hi) {
    return hi * (static_cast<double>((next() >> 11) + 1) * 0x1.0p-53);
  }

  // Uniform integer in [0, n). Modulo bias is irrelevant at the n used here
  // and keeping the mapping trivial keeps traces portable.
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

 private:
  std::uint64_t state_;
};

// Derives a child seed from (root, index); used to give every sweep trial its
// own reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  SplitMix64 g(root ^ (0xa0761d6478bd642full * (index + 1)));
  return g.next();
}

}  // namespace contentcast
