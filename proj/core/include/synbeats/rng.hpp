#pragma once

#include <cstdint>

namespace synbeats {

/**
 * @brief SplitMix64 generator (Steele, Lea & Flood 2014).
 *
 * Output depends only on the 64-bit state, so a seed produces the same
 * stream on every platform and compiler. Conversions to doubles are done
 * here instead of through <random> distributions, whose algorithms are
 * implementation-defined.
 */
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;

    /// Standard normal via Box-Muller (one draw per call).
    double normal() noexcept;

private:
    std::uint64_t state_;
};

/// Deterministic child seed for (base, stream); independent of evaluation order.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

} // namespace synbeats
