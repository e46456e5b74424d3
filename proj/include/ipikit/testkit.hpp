#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ipikit/bitstream.hpp"

namespace ipikit {

// Single-sequence statistics. Each returns a p-value in [0, 1]; small means
// the sequence looks nonrandom under that statistic.
double monobit_test(const BitStream& bits, std::size_t min_length = 100);
double block_frequency_test(const BitStream& bits, int block_size = 128);
double runs_test(const BitStream& bits);

enum class CusumDirection { Forward, Reverse };
double cusum_test(const BitStream& bits, CusumDirection dir);

// Overlapping m-gram serial statistic; returns the two p-values (first and
// second difference). 2 <= m <= 16, length > m.
std::pair<double, double> serial_test(const BitStream& bits, int m = 4);

// Lower edge of the acceptable pass proportion for m sequences at
// significance alpha: (1-alpha) - 3 sqrt(alpha (1-alpha) / m).
double proportion_ci_low(double alpha, std::size_t m);

struct TestLine {
    std::string name;
    std::vector<double> p_values; // one per sequence
    std::size_t pass_count = 0;   // p >= alpha
    double proportion = 0.0;
    double ci_low = 0.0;
    bool proportion_pass = false;
};

struct BatteryReport {
    std::size_t seq_len = 0;
    std::size_t sequences = 0; // m
    double alpha = 0.0;
    std::vector<TestLine> tests; // seven statistic rows
    bool all_pass = false;
};

constexpr std::size_t kBatterySeqLens[] = {10000, 1000000};

// Splits bits into floor(size / seq_len) sequences and applies the five
// tests (seven statistic rows: cusum both directions, serial both
// p-values), judging each row by the proportion rule.
BatteryReport run_battery(const BitStream& bits, std::size_t seq_len,
                          double alpha);

struct ScatterSet {
    int word_size = 0;
    std::vector<std::pair<double, double>> points; // (u_i, u_{i+1}) in [0,1)^2
};

// Consecutive word_size-bit words scaled to [0, 1), paired with stride 1.
ScatterSet scatter_points(const BitStream& bits, int word_size);

enum class ExportFormat {
    Packed, // big-endian bytes, first stream bit = MSB of byte 0, zero padded
    Ascii,  // '0' / '1' characters
};

std::string export_raw(const BitStream& bits, ExportFormat fmt);
BitStream import_ascii(std::string_view text);
BitStream import_packed(std::string_view bytes, std::size_t bit_length);

} // namespace ipikit
