#include "ipikit/bitstream.hpp"

#include <algorithm>

#include "ipikit/error.hpp"

namespace ipikit {

BitStream BitStream::from_string(std::string_view zeros_ones) {
    BitStream bs;
    for (char c : zeros_ones) {
        if (c == '0')
            bs.push_back(false);
        else if (c == '1')
            bs.push_back(true);
        else
            throw Error("bad character in bit string: '" + std::string(1, c) + "'");
    }
    return bs;
}

void BitStream::push_back(bool bit) {
    const std::size_t off = len_ & 63;
    if (off == 0) words_.push_back(0);
    if (bit) words_.back() |= 1ULL << (63 - off);
    ++len_;
}

void BitStream::append_bits(std::uint64_t value, int k) {
    if (k < 0 || k > 64) throw Error("bad k (want 0..64): " + std::to_string(k));
    for (int j = k - 1; j >= 0; --j) push_back((value >> j) & 1u);
}

void BitStream::append(const BitStream& other) {
    std::size_t pos = 0;
    while (pos < other.len_) {
        const int chunk = static_cast<int>(std::min<std::size_t>(64, other.len_ - pos));
        append_bits(other.window(pos, chunk), chunk);
        pos += chunk;
    }
}

std::uint64_t BitStream::window(std::size_t pos, int n) const {
    if (n < 1 || n > 64) throw Error("bad window width: " + std::to_string(n));
    if (pos + n > len_) throw Error("window past end of stream");
    const std::size_t w = pos >> 6;
    const int off = static_cast<int>(pos & 63);
    std::uint64_t x = words_[w] << off;
    if (off + n > 64) x |= words_[w + 1] >> (64 - off);
    return n == 64 ? x : x >> (64 - n);
}

std::uint64_t BitStream::window_wrapped(std::size_t pos, int n,
                                        std::size_t wrap_len) const {
    if (wrap_len == 0 || wrap_len > len_) throw Error("bad wrap length");
    if (n < 1 || n > 64) throw Error("bad window width: " + std::to_string(n));
    pos %= wrap_len;
    if (pos + n <= wrap_len) return window(pos, static_cast<int>(n));
    const int head = static_cast<int>(wrap_len - pos);
    std::uint64_t x = window(pos, head) << (n - head);
    // The tail may itself wrap several times when n > wrap_len.
    int need = n - head;
    while (need > 0) {
        const int chunk = static_cast<int>(
            std::min<std::size_t>(static_cast<std::size_t>(need), wrap_len));
        x |= window(0, chunk) << (need - chunk);
        need -= chunk;
    }
    return x;
}

BitStream BitStream::slice(std::size_t pos, std::size_t len) const {
    if (pos + len > len_) throw Error("slice past end of stream");
    BitStream out;
    std::size_t done = 0;
    while (done < len) {
        const int chunk = static_cast<int>(std::min<std::size_t>(64, len - done));
        out.append_bits(window(pos + done, chunk), chunk);
        done += chunk;
    }
    return out;
}

std::string BitStream::to_string() const {
    std::string s;
    s.reserve(len_);
    for (std::size_t i = 0; i < len_; ++i) s += (*this)[i] ? '1' : '0';
    return s;
}

BitStream concat_series(std::span<const NormalizedIpi> series, int k) {
    if (k < 1 || k > 8) throw Error("bad k (want 1..8): " + std::to_string(k));
    if (series.empty()) throw Error("empty series");
    BitStream bs;
    for (const auto& ipi : series) bs.append_bits(k_lsb(ipi, k), k);
    return bs;
}

NgramDistribution circular_ngram_distribution(const BitStream& z, int n) {
    if (n < 1 || n > kMaxNgramBits)
        throw Error("bad n (want 1.." + std::to_string(kMaxNgramBits) + ")");
    if (z.size() < static_cast<std::size_t>(n))
        throw Error("too short: stream has " + std::to_string(z.size()) +
                    " bits, need at least " + std::to_string(n));
    const std::size_t blocks = z.size() / n;
    const std::size_t trunc = blocks * n;
    NgramDistribution d{n, std::vector<std::uint64_t>(std::size_t{1} << n, 0), 0};
    for (int off = 0; off < n; ++off) {
        for (std::size_t b = 0; b < blocks; ++b) {
            const std::size_t pos = static_cast<std::size_t>(off) + b * n;
            std::uint64_t w;
            if (pos + n <= trunc) {
                w = z.window(pos, n);
            } else {
                const int head = static_cast<int>(trunc - pos);
                w = (z.window(pos, head) << (n - head)) | z.window(0, n - head);
            }
            ++d.counts[w];
        }
    }
    d.total = trunc;
    return d;
}

NgramDistribution block_ngram_distribution(const BitStream& z, int n) {
    if (n < 1 || n > kMaxNgramBits)
        throw Error("bad n (want 1.." + std::to_string(kMaxNgramBits) + ")");
    if (z.size() < static_cast<std::size_t>(n))
        throw Error("too short: stream has " + std::to_string(z.size()) +
                    " bits, need at least " + std::to_string(n));
    const std::size_t blocks = z.size() / n;
    NgramDistribution d{n, std::vector<std::uint64_t>(std::size_t{1} << n, 0), 0};
    for (std::size_t b = 0; b < blocks; ++b) ++d.counts[z.window(b * n, n)];
    d.total = blocks;
    return d;
}

std::vector<double> probabilities(const NgramDistribution& d) {
    if (d.total == 0) throw Error("empty distribution");
    std::vector<double> p(d.counts.size());
    const double t = static_cast<double>(d.total);
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = static_cast<double>(d.counts[i]) / t;
    return p;
}

} // namespace ipikit
