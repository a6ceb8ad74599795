#pragma once

#include <cstdint>

namespace conecast {

// splitmix64: the fixture generator named in the docs. Counter-based, so the
// same seed reproduces the same stream on every platform.
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [-1, 1)
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    // uniform integer in [lo, hi], inclusive
    uint64_t next_range(uint64_t lo, uint64_t hi) {
        return lo + next_u64() % (hi - lo + 1);
    }

  private:
    uint64_t state_;
};

} // namespace conecast
