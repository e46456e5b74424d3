#include "ipikit/rng.hpp"

#include <cmath>
#include <numbers>

namespace ipikit {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    // Lemire multiply-shift; tiny modulo bias (< 2^-64 * bound) is
    // irrelevant at the bounds used here and keeps the call branch-free.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
}

double SplitMix64::normal() {
    // u1 in (0, 1] so the log is finite; u2 in [0, 1).
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0xA5A5A5A55A5A5A5AULL + index * 0x9E3779B97F4A7C15ULL));
    g.next();
    return g.next();
}

} // namespace ipikit
