#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipikit/ipi.hpp"

namespace ipikit {

// Append-only bit sequence packed MSB-first into 64-bit words: bit i of the
// stream is bit (63 - i%64) of word i/64. MSB-first matters because n-gram
// windows, export bytes and word concatenation all read in stream order.
class BitStream {
public:
    BitStream() = default;

    static BitStream from_string(std::string_view zeros_ones);

    void push_back(bool bit);

    // Appends the k low bits of value, most significant of the k first.
    void append_bits(std::uint64_t value, int k);

    void append(const BitStream& other);

    bool operator[](std::size_t i) const {
        return (words_[i >> 6] >> (63 - (i & 63))) & 1u;
    }

    std::size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    // n consecutive bits starting at pos as an integer, first bit most
    // significant; n in 1..64, pos + n <= size().
    std::uint64_t window(std::size_t pos, int n) const;

    // Same, but positions wrap modulo wrap_len (wrap_len <= size()).
    std::uint64_t window_wrapped(std::size_t pos, int n,
                                 std::size_t wrap_len) const;

    BitStream slice(std::size_t pos, std::size_t len) const;

    std::string to_string() const;

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    std::vector<std::uint64_t> words_;
    std::size_t len_ = 0;
};

// Concatenation of the k low bits of each normalized interval, stream order
// = series order, each word MSB-first.
BitStream concat_series(std::span<const NormalizedIpi> series, int k);

constexpr int kMaxNgramBits = 16;

struct NgramDistribution {
    int n = 0;
    std::vector<std::uint64_t> counts; // indexed by the n-bit pattern value
    std::uint64_t total = 0;
};

// Circulation counting: the stream is truncated to the largest multiple of n,
// then for each of the n phase offsets the non-overlapping n-bit blocks are
// read, wrapping past the truncated end back to position zero. Every bit
// contributes to exactly n blocks and total == truncated length.
NgramDistribution circular_ngram_distribution(const BitStream& z, int n);

// Plain single-phase non-overlapping blocks, no wrap; total == floor(L/n).
NgramDistribution block_ngram_distribution(const BitStream& z, int n);

std::vector<double> probabilities(const NgramDistribution& d);

} // namespace ipikit
