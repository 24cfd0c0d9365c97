// Seed splitting and per-run generators.
//
// All randomness in an experiment derives from one root seed.  Streams are
// split with SplitMix64: stream k uses splitmix64(root + k * GOLDEN) as the
// mt19937_64 seed.  Identical (config, seed) therefore reproduces identical
// traces regardless of how many runs execute or in which order.
#pragma once

#include <cstdint>
#include <random>

namespace repgame {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class SeedSplitter {
 public:
  explicit SeedSplitter(std::uint64_t root) : root_(root) {}

  std::uint64_t stream(std::uint64_t k) const {
    return splitmix64(root_ + k * 0x9e3779b97f4a7c15ULL);
  }

  std::mt19937_64 engine(std::uint64_t k) const {
    return std::mt19937_64(stream(k));
  }

 private:
  std::uint64_t root_;
};

// Uniform [0,1) draw; the public randomization device xi_t.
inline double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace repgame
