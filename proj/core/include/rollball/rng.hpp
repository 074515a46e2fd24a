#pragma once

#include <cstdint>

namespace rollball {

/// Counter-based deterministic generator for sampled checks.
///
/// Each draw is a pure function of (seed, counter), so sampled verification
/// points are reproducible across platforms and independent of call order
/// when callers index draws explicitly.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    /// i-th raw 64-bit word of the stream (splitmix64 of seed + i).
    std::uint64_t word(std::uint64_t i) const {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * (i + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// i-th draw in [0, 1).
    double uniform(std::uint64_t i) const {
        return static_cast<double>(word(i) >> 11) * 0x1.0p-53;
    }

    /// i-th draw in [lo, hi).
    double uniform(std::uint64_t i, double lo, double hi) const {
        return lo + (hi - lo) * uniform(i);
    }

    /// Sequential draws from an internal counter, for simple call sites.
    double next() { return uniform(counter_++); }
    double next(double lo, double hi) { return uniform(counter_++, lo, hi); }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace rollball
