#include "synbeats/rng.hpp"

#include <cmath>
#include <numbers>

namespace synbeats {

std::uint64_t SplitMix64::below(std::uint64_t n) noexcept {
    // Rejection keeps the result unbiased.
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
}

double SplitMix64::normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    SplitMix64 mixer(base ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
    mixer.next();
    return mixer.next();
}

} // namespace synbeats
