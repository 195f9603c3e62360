#pragma once

#include <cstdint>
#include <random>

namespace eozip {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic RNG. mt19937_64 has a fixed standard-mandated output
// sequence, so results are reproducible across platforms. Derived draws
// use plain modulo; the slight bias is irrelevant for test sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  std::uint64_t next() { return eng_(); }

  std::uint64_t below(std::uint64_t bound) {
    return bound == 0 ? 0 : next() % bound;
  }

  bool flip() { return (next() & 1u) != 0; }

  // Independent stream for trial `index` under a master seed. Used to
  // split verification trials across workers with order-independent
  // results.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed * 0x9e3779b97f4a7c15ULL + index + 1));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace eozip
