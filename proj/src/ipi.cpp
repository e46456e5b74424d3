#include "ipikit/ipi.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "ipikit/error.hpp"
#include "ipikit/rng.hpp"

namespace ipikit {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int clamp_raw(double x) {
    const long v = std::lround(x);
    return static_cast<int>(std::clamp(v, static_cast<long>(kRawIpiMin),
                                       static_cast<long>(kRawIpiMax)));
}

} // namespace

NormalizedIpi normalize(int raw) {
    if (raw < kRawIpiMin || raw > kRawIpiMax)
        throw Error("ipi value out of range [20, 330]: " + std::to_string(raw));
    const int value = raw - kRawIpiMin;
    return {value, static_cast<std::uint8_t>(value & 0xFF)};
}

std::vector<NormalizedIpi> normalize_series(const IpiSeries& series) {
    std::vector<NormalizedIpi> out;
    out.reserve(series.values.size());
    for (int raw : series.values) out.push_back(normalize(raw));
    return out;
}

std::uint8_t k_lsb(const NormalizedIpi& ipi, int k) {
    if (k < 1 || k > 8) throw Error("bad k (want 1..8): " + std::to_string(k));
    return static_cast<std::uint8_t>(ipi.bits8 & ((1u << k) - 1u));
}

IpiSeries parse_ipi_file(std::string_view content) {
    IpiSeries series;
    bool header_seen = false;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        const auto nl = content.find('\n', pos);
        std::string_view line = content.substr(
            pos, nl == std::string_view::npos ? content.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            // The first significant line must carry the subject id.
            constexpr std::string_view prefix = "# subject:";
            if (!line.starts_with(prefix))
                throw Error("malformed header at line " + std::to_string(lineno) +
                            " (expected '# subject: <id>')");
            series.subject_id = std::string(trim(line.substr(prefix.size())));
            if (series.subject_id.empty())
                throw Error("malformed header: empty subject id");
            header_seen = true;
            continue;
        }
        if (line.front() == '#') continue;
        int value = 0;
        const auto [p, ec] =
            std::from_chars(line.data(), line.data() + line.size(), value);
        if (ec != std::errc{} || p != line.data() + line.size())
            throw Error("bad ipi line " + std::to_string(lineno) + ": '" +
                        std::string(line) + "'");
        if (value < kRawIpiMin || value > kRawIpiMax) {
            ++series.rejected_count;
            continue;
        }
        series.values.push_back(value);
    }
    if (!header_seen) throw Error("malformed header: missing '# subject:' line");
    if (series.values.empty()) throw Error("empty series for subject '" +
                                           series.subject_id + "'");
    return series;
}

std::string serialize_ipi_file(const IpiSeries& series) {
    std::string out = "# subject: " + series.subject_id + "\n";
    for (int v : series.values) {
        out += std::to_string(v);
        out += '\n';
    }
    return out;
}

RrConversion rr_times_to_ipi(std::span<const double> timestamps) {
    RrConversion conv;
    if (timestamps.size() < 2)
        throw Error("empty series: need at least two beat timestamps");
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        const double dt = timestamps[i] - timestamps[i - 1];
        if (!(dt > 0.0))
            throw Error("non-monotone timestamps at index " + std::to_string(i));
        // Seconds to centiseconds, round half up (dt > 0, so lround agrees).
        const long cs = std::lround(dt * 100.0);
        if (cs < kRawIpiMin || cs > kRawIpiMax) {
            ++conv.rejected;
            continue;
        }
        conv.values.push_back(static_cast<int>(cs));
    }
    if (conv.values.empty()) throw Error("empty series after range filtering");
    return conv;
}

std::optional<SynthKind> synth_kind_from_string(std::string_view name) {
    if (name == "iid-uniform-bits") return SynthKind::IidUniformBits;
    if (name == "iid-histogram") return SynthKind::IidHistogram;
    if (name == "ar1") return SynthKind::Ar1;
    return std::nullopt;
}

std::string_view to_string(SynthKind kind) {
    switch (kind) {
    case SynthKind::IidUniformBits: return "iid-uniform-bits";
    case SynthKind::IidHistogram: return "iid-histogram";
    case SynthKind::Ar1: return "ar1";
    }
    return "?";
}

SynthStream::SynthStream(const SynthModel& model)
    : model_(model), rng_(model.seed) {
    if (model_.kind != SynthKind::IidUniformBits) {
        if (!(model_.noise_sd > 0.0)) throw Error("config: noise_sd must be > 0");
        if (model_.mean < kRawIpiMin || model_.mean > kRawIpiMax)
            throw Error("config: mean outside raw ipi range");
    }
    if (model_.kind == SynthKind::Ar1 &&
        (model_.ar_coefficient < 0.0 || model_.ar_coefficient >= 1.0))
        throw Error("config: ar coefficient must lie in [0, 1)");
    prev_ = clamp_raw(model_.mean);
}

int SynthStream::next() {
    switch (model_.kind) {
    case SynthKind::IidUniformBits:
        return kRawIpiMin + static_cast<int>(rng_.next() & 0xFF);
    case SynthKind::IidHistogram:
        return clamp_raw(rng_.normal(model_.mean, model_.noise_sd));
    case SynthKind::Ar1:
        prev_ = clamp_raw(model_.mean +
                          model_.ar_coefficient * (prev_ - model_.mean) +
                          rng_.normal(0.0, model_.noise_sd));
        return prev_;
    }
    throw Error("config: unknown synth kind");
}

IpiSeries synth_generate(const SynthModel& model, std::size_t count,
                         std::string subject_id) {
    if (count == 0) throw Error("empty series: synth count must be positive");
    IpiSeries series;
    series.subject_id = std::move(subject_id);
    series.values.reserve(count);
    SynthStream stream(model);
    for (std::size_t i = 0; i < count; ++i)
        series.values.push_back(stream.next());
    return series;
}

} // namespace ipikit
