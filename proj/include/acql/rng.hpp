#pragma once

#include <cstdint>
#include <string>

namespace acql {

// splitmix64; deterministic across platforms, unlike the standard library
// distributions. All randomness in the project flows through this.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) by rejection-free scaling (bias < 2^-32 for small n).
  uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// Stable stream derivation: hash of (seed, component name, index) so results
// do not depend on call ordering elsewhere.
uint64_t derive_seed(uint64_t seed, const std::string& component, uint64_t index = 0);

}  // namespace acql
