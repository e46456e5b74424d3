#include "ipikit/testkit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include "ipikit/error.hpp"

namespace ipikit {

namespace {

double igamc(double a, double x) {
    static const bool handler_off = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)handler_off;
    gsl_sf_result res;
    const int status = gsl_sf_gamma_inc_Q_e(a, x, &res);
    if (status == GSL_SUCCESS) return res.val;
    if (status == GSL_EUNDRFLW) return 0.0;
    throw Error("incomplete gamma failed: a=" + std::to_string(a) +
                " x=" + std::to_string(x));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

std::size_t count_ones(const BitStream& bits) {
    // Popcount over the packed words; trailing bits of the last word are 0.
    std::size_t ones = 0;
    for (std::uint64_t w : bits.words()) ones += std::popcount(w);
    return ones;
}

} // namespace

double monobit_test(const BitStream& bits, std::size_t min_length) {
    const std::size_t len = bits.size();
    if (len < min_length || len == 0)
        throw Error("insufficient bits: " + std::to_string(len));
    const std::size_t ones = count_ones(bits);
    const double s = std::abs(2.0 * static_cast<double>(ones) -
                              static_cast<double>(len));
    return clamp01(std::erfc(s / std::sqrt(static_cast<double>(len)) /
                             std::sqrt(2.0)));
}

double block_frequency_test(const BitStream& bits, int block_size) {
    if (block_size < 2) throw Error("bad block size");
    const std::size_t m = static_cast<std::size_t>(block_size);
    const std::size_t nblocks = bits.size() / m;
    if (nblocks == 0) throw Error("insufficient bits: " + std::to_string(bits.size()));
    double chi2 = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        std::size_t ones = 0;
        for (std::size_t i = 0; i < m; ++i) ones += bits[b * m + i];
        const double pi = static_cast<double>(ones) / static_cast<double>(m);
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * static_cast<double>(m);
    return clamp01(igamc(static_cast<double>(nblocks) / 2.0, chi2 / 2.0));
}

double runs_test(const BitStream& bits) {
    const std::size_t len = bits.size();
    if (len < 100) throw Error("insufficient bits: " + std::to_string(len));
    const double n = static_cast<double>(len);
    const double pi = static_cast<double>(count_ones(bits)) / n;
    // Frequency prerequisite: a sequence that already fails monobit badly
    // gets p = 0 without running the statistic.
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) return 0.0;
    std::size_t v = 1;
    for (std::size_t i = 0; i + 1 < len; ++i) v += bits[i] != bits[i + 1];
    const double num = std::abs(static_cast<double>(v) - 2.0 * n * pi * (1.0 - pi));
    const double den = 2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi);
    return clamp01(std::erfc(num / den));
}

double cusum_test(const BitStream& bits, CusumDirection dir) {
    const std::size_t len = bits.size();
    if (len < 100) throw Error("insufficient bits: " + std::to_string(len));
    const double n = static_cast<double>(len);
    long s = 0;
    long z = 0;
    for (std::size_t i = 0; i < len; ++i) {
        const bool bit = dir == CusumDirection::Forward ? bits[i]
                                                        : bits[len - 1 - i];
        s += bit ? 1 : -1;
        z = std::max(z, std::labs(s));
    }
    const double zd = static_cast<double>(z);
    const double sq = std::sqrt(n);
    double sum1 = 0.0;
    {
        const long k_lo = static_cast<long>(std::floor((-n / zd + 1.0) / 4.0));
        const long k_hi = static_cast<long>(std::floor((n / zd - 1.0) / 4.0));
        for (long k = k_lo; k <= k_hi; ++k) {
            const double kk = static_cast<double>(k);
            sum1 += normal_cdf((4.0 * kk + 1.0) * zd / sq) -
                    normal_cdf((4.0 * kk - 1.0) * zd / sq);
        }
    }
    double sum2 = 0.0;
    {
        const long k_lo = static_cast<long>(std::floor((-n / zd - 3.0) / 4.0));
        const long k_hi = static_cast<long>(std::floor((n / zd - 1.0) / 4.0));
        for (long k = k_lo; k <= k_hi; ++k) {
            const double kk = static_cast<double>(k);
            sum2 += normal_cdf((4.0 * kk + 3.0) * zd / sq) -
                    normal_cdf((4.0 * kk + 1.0) * zd / sq);
        }
    }
    return clamp01(1.0 - sum1 + sum2);
}

namespace {

// psi-square statistic over overlapping m-grams with wraparound.
double psi_squared(const BitStream& bits, int m) {
    if (m <= 0) return 0.0;
    const std::size_t len = bits.size();
    const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
    std::vector<std::uint64_t> counts(std::size_t{1} << m, 0);
    std::uint64_t idx = 0;
    for (int i = 0; i < m - 1; ++i)
        idx = (idx << 1) | static_cast<std::uint64_t>(bits[i % len]);
    for (std::size_t i = 0; i < len; ++i) {
        const std::size_t next = (i + static_cast<std::size_t>(m) - 1) % len;
        idx = ((idx << 1) | static_cast<std::uint64_t>(bits[next])) & mask;
        counts[idx] += 1;
    }
    double sum = 0.0;
    for (std::uint64_t c : counts)
        sum += static_cast<double>(c) * static_cast<double>(c);
    const double n = static_cast<double>(len);
    return sum * std::exp2(m) / n - n;
}

} // namespace

std::pair<double, double> serial_test(const BitStream& bits, int m) {
    if (m < 2 || m > 16) throw Error("bad m (want 2..16)");
    if (bits.size() <= static_cast<std::size_t>(m))
        throw Error("insufficient bits: " + std::to_string(bits.size()));
    const double psi_m = psi_squared(bits, m);
    const double psi_m1 = psi_squared(bits, m - 1);
    const double psi_m2 = psi_squared(bits, m - 2);
    // The differences are nonnegative in exact arithmetic; rounding can
    // leave a tiny negative residue that the gamma tail must not see.
    const double d1 = std::max(0.0, psi_m - psi_m1);
    const double d2 = std::max(0.0, psi_m - 2.0 * psi_m1 + psi_m2);
    const double p1 = igamc(std::exp2(m - 2), d1 / 2.0);
    const double p2 = igamc(std::exp2(m - 3), d2 / 2.0);
    return {clamp01(p1), clamp01(p2)};
}

double proportion_ci_low(double alpha, std::size_t m) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("bad alpha");
    if (m == 0) throw Error("insufficient data: no sequences");
    const double phat = 1.0 - alpha;
    return phat - 3.0 * std::sqrt(phat * (1.0 - phat) / static_cast<double>(m));
}

BatteryReport run_battery(const BitStream& bits, std::size_t seq_len,
                          double alpha) {
    if (std::find(std::begin(kBatterySeqLens), std::end(kBatterySeqLens),
                  seq_len) == std::end(kBatterySeqLens))
        throw Error("bad seq_len: " + std::to_string(seq_len) +
                    " (want 10000 or 1000000)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("bad alpha");
    const std::size_t m = bits.size() / seq_len;
    if (m == 0)
        throw Error("insufficient data: " + std::to_string(bits.size()) +
                    " bits cannot fill one sequence of " +
                    std::to_string(seq_len));

    BatteryReport rep;
    rep.seq_len = seq_len;
    rep.sequences = m;
    rep.alpha = alpha;
    rep.tests.resize(7);
    const char* names[7] = {"monobit",      "block_frequency", "runs",
                            "cusum_forward", "cusum_reverse",   "serial_p1",
                            "serial_p2"};
    for (int t = 0; t < 7; ++t) rep.tests[t].name = names[t];

    for (std::size_t s = 0; s < m; ++s) {
        const BitStream seq = bits.slice(s * seq_len, seq_len);
        const auto serial = serial_test(seq, 4);
        const double p[7] = {monobit_test(seq),
                             block_frequency_test(seq, 128),
                             runs_test(seq),
                             cusum_test(seq, CusumDirection::Forward),
                             cusum_test(seq, CusumDirection::Reverse),
                             serial.first,
                             serial.second};
        for (int t = 0; t < 7; ++t) rep.tests[t].p_values.push_back(p[t]);
    }

    const double ci = proportion_ci_low(alpha, m);
    rep.all_pass = true;
    for (auto& line : rep.tests) {
        line.pass_count = static_cast<std::size_t>(
            std::count_if(line.p_values.begin(), line.p_values.end(),
                          [&](double p) { return p >= alpha; }));
        line.proportion = static_cast<double>(line.pass_count) /
                          static_cast<double>(m);
        line.ci_low = ci;
        line.proportion_pass = line.proportion >= ci;
        rep.all_pass = rep.all_pass && line.proportion_pass;
    }
    return rep;
}

ScatterSet scatter_points(const BitStream& bits, int word_size) {
    if (word_size < 1 || word_size > 32) throw Error("bad word size");
    const std::size_t words = bits.size() / static_cast<std::size_t>(word_size);
    if (words < 2) throw Error("too short: need at least two words");
    ScatterSet s;
    s.word_size = word_size;
    const double scale = std::exp2(-word_size);
    std::vector<double> u(words);
    for (std::size_t i = 0; i < words; ++i)
        u[i] = static_cast<double>(
                   bits.window(i * static_cast<std::size_t>(word_size),
                               word_size)) *
               scale;
    s.points.reserve(words - 1);
    for (std::size_t i = 0; i + 1 < words; ++i)
        s.points.emplace_back(u[i], u[i + 1]);
    return s;
}

std::string export_raw(const BitStream& bits, ExportFormat fmt) {
    if (fmt == ExportFormat::Ascii) return bits.to_string();
    std::string out;
    const std::size_t len = bits.size();
    out.reserve((len + 7) / 8);
    for (std::size_t pos = 0; pos < len; pos += 8) {
        const int take = static_cast<int>(std::min<std::size_t>(8, len - pos));
        const auto byte = static_cast<unsigned>(bits.window(pos, take))
                          << (8 - take);
        out += static_cast<char>(byte);
    }
    return out;
}

BitStream import_ascii(std::string_view text) {
    BitStream bs;
    for (char c : text) {
        if (c == '0')
            bs.push_back(false);
        else if (c == '1')
            bs.push_back(true);
        else if (c == '\n' || c == '\r' || c == '\t' || c == ' ')
            continue;
        else
            throw Error("bad character in bit file");
    }
    return bs;
}

BitStream import_packed(std::string_view bytes, std::size_t bit_length) {
    if (bit_length > bytes.size() * 8)
        throw Error("bit length exceeds available bytes");
    BitStream bs;
    for (std::size_t i = 0; i < bit_length; ++i) {
        const auto byte = static_cast<unsigned char>(bytes[i >> 3]);
        bs.push_back((byte >> (7 - (i & 7))) & 1u);
    }
    return bs;
}

} // namespace ipikit
