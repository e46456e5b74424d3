#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ipikit/bitstream.hpp"
#include "ipikit/ipi.hpp"

namespace ipikit {

constexpr int kMaxJointBits = 12;

// Joint n-gram distribution of two streams read in lock step: block b is
// (x[bn..bn+n), y[bn..bn+n)), single phase, no wrap, truncated to the
// shorter stream. counts is 2^n x 2^n row-major (x pattern selects the row).
struct JointDistribution {
    int n = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    std::uint64_t at(std::uint32_t xw, std::uint32_t yw) const {
        return counts[(static_cast<std::size_t>(xw) << n) | yw];
    }
};

JointDistribution joint_distribution(const BitStream& x, const BitStream& y,
                                     int n);

// e_indp = H(X) + H(Y) - H(X,Y), the plug-in mutual information of the
// aligned block processes, in bits; 0 means no detected dependency.
struct DependencyReport {
    int n = 0;
    double h_x = 0.0;
    double h_y = 0.0;
    double h_xy = 0.0;
    double e_indp = 0.0;
};

DependencyReport e_indp(const BitStream& x, const BitStream& y, int n);

struct PairTrial {
    std::size_t trial = 0;
    std::string subject_a;
    std::string subject_b;
    double e_indp = 0.0;
};

struct PairSampleSummary {
    std::size_t trials = 0;
    int n = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
    std::vector<PairTrial> outliers; // beyond 1.5 IQR from the quartiles
    std::vector<PairTrial> all;
};

// Linear-interpolation quantile of an ascending-sorted sample (the common
// h = (N-1) q rule); q in [0, 1].
double interpolated_quantile(std::span<const double> sorted, double q);

// Repeatedly draws an unordered pair of distinct subjects (uniformly among
// those with at least min_length intervals), computes e_indp of their 2-LSB
// streams and summarizes. Deterministic in seed.
PairSampleSummary pair_sampling(std::span<const IpiSeries> subjects,
                                std::size_t trials, std::size_t min_length,
                                int n, std::uint64_t seed);

} // namespace ipikit
