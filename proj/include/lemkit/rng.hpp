#pragma once

// SplitMix64 (Steele, Lea & Flood, 2014): the single deterministic random
// generator used throughout the library. Every randomized behaviour (weight
// init, shuffling, context sampling, toy-corpus generation) draws from an
// instance of this engine, so results are reproducible bit-for-bit across
// platforms and standard libraries.
//
// Integer sampling uses rejection on the high bits rather than a modulo, so
// the distribution over [lo, hi] is exactly uniform.

#include <cstdint>
#include <vector>

namespace lemkit {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double next_real() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform_real(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_real();
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_below(std::uint64_t n) noexcept {
        // Smallest all-ones mask covering n-1; rejection keeps it unbiased.
        std::uint64_t mask = n - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        for (;;) {
            const std::uint64_t v = next_u64() & mask;
            if (v < n) return v;
        }
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
        const std::uint64_t span =
            static_cast<std::uint64_t>(hi - lo) + 1ULL;
        return lo + static_cast<std::int64_t>(uniform_below(span));
    }

    bool bernoulli(double p) noexcept { return next_real() < p; }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) noexcept {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j =
                static_cast<std::size_t>(uniform_below(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

    /// Derive an independent stream for a named purpose. Mixing the label's
    /// hash into the seed keeps streams decoupled without global state.
    SplitMix64 derive(std::uint64_t salt) const noexcept {
        SplitMix64 mixer(state_ ^ (salt * 0x9E3779B97F4A7C15ULL));
        return SplitMix64(mixer.next_u64());
    }

private:
    std::uint64_t state_;
};

}  // namespace lemkit
