#include "ipikit/extractor.hpp"

#include <bit>
#include <cmath>

#include "ipikit/error.hpp"

namespace ipikit {

void validate(const ExtractorConfig& cfg) {
    if (cfg.k < 1 || cfg.k > 8)
        throw Error("bad k (want 1..8): " + std::to_string(cfg.k));
    if (std::popcount(cfg.g1_mask) != 4)
        throw Error("config: group mask must select exactly 4 triads");
    if (cfg.t_high <= 0 || cfg.t_low >= 0)
        throw Error("config: thresholds must straddle 0");
    if (cfg.t_high != -cfg.t_low)
        throw Error("config: thresholds must be symmetric");
}

int classify_triad(std::uint8_t triad, const ExtractorConfig& cfg) {
    if (triad > 7) throw Error("bad triad value");
    return (cfg.g1_mask >> triad) & 1u ? +1 : -1;
}

std::optional<bool> mre_step(MartingaleState& state, std::uint8_t triad,
                             const ExtractorConfig& cfg) {
    state.x += classify_triad(triad, cfg);
    ++state.triads_consumed;
    if (state.x > cfg.t_high) {
        state.x = 0;
        ++state.bits_emitted;
        return true;
    }
    if (state.x < cfg.t_low) {
        state.x = 0;
        ++state.bits_emitted;
        return false;
    }
    return std::nullopt;
}

ExtractionResult extract(std::span<const NormalizedIpi> series,
                         const ExtractorConfig& cfg) {
    validate(cfg);
    const BitStream bits = concat_series(series, cfg.k);
    ExtractionResult r;
    r.input_ipis = series.size();
    const std::size_t triads = bits.size() / 3;
    MartingaleState st;
    for (std::size_t t = 0; t < triads; ++t) {
        const auto triad = static_cast<std::uint8_t>(bits.window(t * 3, 3));
        if (const auto bit = mre_step(st, triad, cfg)) r.output.push_back(*bit);
    }
    r.input_triads = st.triads_consumed;
    r.yield_rate = static_cast<double>(st.bits_emitted) /
                   static_cast<double>(r.input_ipis);
    return r;
}

StreamExtractor::StreamExtractor(ExtractorConfig cfg) : cfg_(cfg) {
    validate(cfg_);
}

void StreamExtractor::feed(const BitStream& chunk) {
    for (std::size_t i = 0; i < chunk.size(); ++i) {
        pending_ = static_cast<std::uint8_t>((pending_ << 1) | chunk[i]);
        if (++pending_len_ == 3) {
            if (const auto bit = mre_step(state_, pending_ & 7u, cfg_))
                out_.push_back(*bit);
            pending_len_ = 0;
        }
    }
    input_bits_ += chunk.size();
}

void StreamExtractor::feed_word(std::uint32_t value, int k) {
    for (int j = k - 1; j >= 0; --j) {
        pending_ = static_cast<std::uint8_t>((pending_ << 1) | ((value >> j) & 1u));
        if (++pending_len_ == 3) {
            if (const auto bit = mre_step(state_, pending_ & 7u, cfg_))
                out_.push_back(*bit);
            pending_len_ = 0;
        }
    }
    input_bits_ += static_cast<std::uint64_t>(k);
}

BitStream gray_code_baseline(std::span<const NormalizedIpi> series, int k) {
    if (k < 1 || k > 8) throw Error("bad k (want 1..8): " + std::to_string(k));
    if (series.empty()) throw Error("empty series");
    BitStream out;
    for (const auto& ipi : series) {
        const auto g = static_cast<std::uint8_t>(ipi.bits8 ^ (ipi.bits8 >> 1));
        out.append_bits(g, k);
    }
    return out;
}

ExtractorConfig derive_grouping(const NgramDistribution& d,
                                const ExtractorConfig& base) {
    if (d.n != 3) throw Error("bad n: grouping needs a triad distribution");
    if (d.total == 0) throw Error("empty distribution");
    const auto p = probabilities(d);
    double best_diff = 2.0;
    std::uint8_t best_mask = 0;
    for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b)
            for (int c = b + 1; c < 8; ++c)
                for (int e = c + 1; e < 8; ++e) {
                    const double sum = p[a] + p[b] + p[c] + p[e];
                    const double diff = std::abs(sum - 0.5);
                    if (diff < best_diff) {
                        best_diff = diff;
                        best_mask = static_cast<std::uint8_t>(
                            (1u << a) | (1u << b) | (1u << c) | (1u << e));
                    }
                }
    ExtractorConfig cfg = base;
    cfg.g1_mask = best_mask;
    validate(cfg);
    return cfg;
}

} // namespace ipikit
