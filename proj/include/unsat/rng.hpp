#pragma once

#include <cstdint>

namespace unsat {

// splitmix64; used both as a seed mixer and as the project-wide PRNG so
// that every seeded result is reproducible across platforms and build
// modes (no reliance on std::distribution implementations).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed, e.g. per scan instance or per
// Monte-Carlo shard.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x2545f4914f6cdd1dULL * (index + 1));
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // burn-in so that nearby seeds decorrelate
    splitmix64(state_);
    splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0, 1)
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [0, bound)
  std::uint64_t next_below(std::uint64_t bound) {
    // multiply-shift; bias is negligible for the bounds used here
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  bool coin() { return (next_u64() & 1) != 0; }

 private:
  std::uint64_t state_;
};

}  // namespace unsat
