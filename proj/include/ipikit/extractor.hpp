#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "ipikit/bitstream.hpp"
#include "ipikit/ipi.hpp"

namespace ipikit {

// Martingale extractor configuration. The source bits are consumed as
// non-overlapping 3-bit triads; triads in group one move the walk up, the
// rest move it down. The default group is the even-parity set
// {000, 011, 101, 110}, encoded as a bitmask over triad values 0..7.
struct ExtractorConfig {
    int k = 2;                   // low bits taken per interval, 1..8
    std::uint8_t g1_mask = 0x69; // must select exactly 4 of the 8 triads
    int t_high = 3;              // emit 1 when the walk exceeds this
    int t_low = -3;              // emit 0 when the walk drops below this
};

void validate(const ExtractorConfig& cfg);

// +1 for group-one triads, -1 otherwise; triad is a 3-bit value.
int classify_triad(std::uint8_t triad, const ExtractorConfig& cfg);

struct MartingaleState {
    int x = 0; // walk position
    std::uint64_t triads_consumed = 0;
    std::uint64_t bits_emitted = 0;
};

// Advances the walk by one triad. Crossing t_high emits 1, crossing t_low
// emits 0; either crossing resets the walk to 0.
std::optional<bool> mre_step(MartingaleState& state, std::uint8_t triad,
                             const ExtractorConfig& cfg);

struct ExtractionResult {
    BitStream output;
    std::uint64_t input_ipis = 0;
    std::uint64_t input_triads = 0;
    double yield_rate = 0.0; // output bits per input interval
};

// Whole-series extraction: k-LSB concatenation, trailing 1-2 bits that do
// not fill a triad are discarded.
ExtractionResult extract(std::span<const NormalizedIpi> series,
                         const ExtractorConfig& cfg);

// Incremental variant for inputs too large to hold as one series. Feeding
// the same bits in any chunking yields the same output as extract().
class StreamExtractor {
public:
    explicit StreamExtractor(ExtractorConfig cfg);

    void feed(const BitStream& chunk);
    void feed_word(std::uint32_t value, int k); // k low bits, MSB-first

    const BitStream& output() const { return out_; }
    const MartingaleState& state() const { return state_; }
    std::uint64_t input_bits() const { return input_bits_; }

private:
    ExtractorConfig cfg_;
    MartingaleState state_;
    BitStream out_;
    std::uint64_t input_bits_ = 0;
    std::uint8_t pending_ = 0;
    int pending_len_ = 0;
};

// Reference comparator: concatenates the k low bits of the Gray codes of the
// normalized values instead of extracting.
BitStream gray_code_baseline(std::span<const NormalizedIpi> series, int k);

// Picks the 4-triad group whose observed probability mass is closest to 1/2
// (exhaustive over all 70 subsets; first subset in lexicographic order wins
// ties) and returns base with g1_mask replaced. d must be a triad (n == 3)
// distribution.
ExtractorConfig derive_grouping(const NgramDistribution& d,
                                const ExtractorConfig& base = {});

} // namespace ipikit
