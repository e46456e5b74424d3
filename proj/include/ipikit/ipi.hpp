#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipikit/rng.hpp"

namespace ipikit {

// Raw interpulse intervals are integer centiseconds in [20, 330]
// (0.2 s at 300 bpm up to a 3.3 s pause).
constexpr int kRawIpiMin = 20;
constexpr int kRawIpiMax = 330;

struct IpiSeries {
    std::string subject_id;
    std::vector<int> values; // raw ms, every element in [kRawIpiMin, kRawIpiMax]
    std::size_t rejected_count = 0;
};

// Normalized interval: value = raw - 20 in [0, 310], bits8 = value mod 256
// (the 9th bit of the 9-bit range is dropped, keeping the low octet).
struct NormalizedIpi {
    int value;
    std::uint8_t bits8;
};

NormalizedIpi normalize(int raw);
std::vector<NormalizedIpi> normalize_series(const IpiSeries& series);

// k least significant bits of the normalized octet, k in 1..8.
std::uint8_t k_lsb(const NormalizedIpi& ipi, int k);

// Text format: first line "# subject: <id>", then one integer per line;
// later lines starting with '#' are comments. Out-of-range values are
// dropped and counted, not fatal; an empty series is.
IpiSeries parse_ipi_file(std::string_view content);
std::string serialize_ipi_file(const IpiSeries& series);

struct RrConversion {
    std::vector<int> values; // centisecond differences inside [20, 330]
    std::size_t rejected = 0;
};

// Converts beat timestamps in seconds to integer centisecond intervals,
// round half up. Timestamps must be strictly increasing.
RrConversion rr_times_to_ipi(std::span<const double> timestamps);

enum class SynthKind {
    IidUniformBits, // raw = 20 + uniform octet; every normalized bit is fair
    IidHistogram,   // iid rounded Gaussian, clamped to the raw range
    Ar1,            // first-order autoregressive integer state, clamped
};

std::optional<SynthKind> synth_kind_from_string(std::string_view name);
std::string_view to_string(SynthKind kind);

struct SynthModel {
    SynthKind kind = SynthKind::IidUniformBits;
    double mean = 150.0;
    double ar_coefficient = 0.0; // Ar1 only, in [0, 1)
    double noise_sd = 0.0;       // IidHistogram / Ar1, > 0
    std::uint64_t seed = 0;
};

// Deterministic for a given model; same model, same series.
IpiSeries synth_generate(const SynthModel& model, std::size_t count,
                         std::string subject_id = "synth");

// Incremental generator behind synth_generate: n calls to next() produce
// exactly the values of synth_generate(model, n).
class SynthStream {
public:
    explicit SynthStream(const SynthModel& model);
    int next();

private:
    SynthModel model_;
    SplitMix64 rng_;
    int prev_ = 0;
};

} // namespace ipikit
