#pragma once

#include <span>
#include <vector>

#include "ipikit/bitstream.hpp"

namespace ipikit {

// All rates are per output bit (the n-bit block entropy divided by n), so a
// perfectly uniform source scores 1 at every n.
struct EntropyReport {
    int n = 0;
    double shannon_rate = 0.0;
    double collision_rate = 0.0;
    double guessing_gap = 0.0;
    double min_entropy_rate = 0.0;
    double l1_distance = 0.0;
};

struct GuessingEntropy {
    double expected_guesses = 0.0; // optimal-order expected number of guesses
    double p_guess = 0.0;          // per-bit success-rate equivalent
    double gap = 0.0;              // p_guess - 1/2
};

// Plug-in Shannon entropy in bits of an explicit distribution. Summation is
// sequential in index order; dependency estimation relies on that for its
// exact self-comparison identity.
double shannon_bits(std::span<const double> p);

// The five per-bit measures. p must have 2^n entries, be nonnegative and
// sum to 1 within 1e-9.
double shannon_entropy(std::span<const double> p, int n);   // rate
double collision_entropy(std::span<const double> p, int n); // rate, log form
GuessingEntropy guessing_entropy(std::span<const double> p, int n);
double min_entropy(std::span<const double> p, int n); // rate
double l1_uniform_distance(std::span<const double> p, int n);

EntropyReport entropy_report(const NgramDistribution& d);

// Reports for n = 1..n_max from circulation counting of z.
std::vector<EntropyReport> full_report(const BitStream& z, int n_max);

} // namespace ipikit
