#pragma once

#include <cstdint>

namespace rcan {

// Deterministic 64-bit generator (splitmix64). Every random draw in the repo
// (weight init, patch sampling, augmentation) goes through this generator so
// that runs reproduce bit-for-bit from a seed; the exact update rule is
// documented in the README.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1): top 53 bits scaled by 2^-53.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi].
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform integer in [0, n), n > 0. Plain modulo; the bias is irrelevant
    // at our range sizes and the rule stays trivial to reproduce elsewhere.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

}  // namespace rcan
