#pragma once

#include <cstdint>

namespace ipikit {

// Deterministic 64-bit generator (splitmix64). Chosen over std::mt19937
// because its output is fully specified by the constants below and therefore
// identical across platforms and standard-library implementations; every
// seeded code path in the library routes through this.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, bound); bound must be nonzero.
    std::uint64_t below(std::uint64_t bound);

    // Uniform double in [0, 1), 53 bits of precision.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Standard normal deviate (Box-Muller on explicit uniforms, so the
    // value stream is platform-independent).
    double normal();

    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::uint64_t state_;
};

// Stable per-task seed derivation: mixes seed and index so that
// neighbouring indices give statistically unrelated streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

} // namespace ipikit
