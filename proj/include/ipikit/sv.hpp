#pragma once

#include <cstdint>
#include <vector>

#include "ipikit/bitstream.hpp"

namespace ipikit {

// Semi-random (weak) source bias of the observed n-gram distribution:
// delta = (p_max - p_min) / (p_max + p_min), 0 for uniform, 1 whenever some
// pattern never occurs.
struct SvDeltaReport {
    int n = 0;
    double p_max = 0.0;
    double p_min = 0.0;
    double delta = 0.0;
    std::uint64_t unseen_patterns = 0;
};

SvDeltaReport sv_delta(const NgramDistribution& d);

// sv_delta for n = 1..n_max from circulation counting of z.
std::vector<SvDeltaReport> sv_curve(const BitStream& z, int n_max);

} // namespace ipikit
