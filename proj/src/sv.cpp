#include "ipikit/sv.hpp"

#include <algorithm>

#include "ipikit/error.hpp"

namespace ipikit {

SvDeltaReport sv_delta(const NgramDistribution& d) {
    if (d.total == 0) throw Error("empty distribution");
    const auto [cmin_it, cmax_it] =
        std::minmax_element(d.counts.begin(), d.counts.end());
    const std::uint64_t cmin = *cmin_it, cmax = *cmax_it;
    SvDeltaReport r;
    r.n = d.n;
    const double t = static_cast<double>(d.total);
    r.p_max = static_cast<double>(cmax) / t;
    r.p_min = static_cast<double>(cmin) / t;
    r.unseen_patterns = static_cast<std::uint64_t>(
        std::count(d.counts.begin(), d.counts.end(), std::uint64_t{0}));
    // Formed from integer counts, not the divided probabilities, so that a
    // count ratio of r gives exactly (r-1)/(r+1); cmax >= 1 since total > 0,
    // and any unseen pattern forces delta == 1.
    r.delta = static_cast<double>(cmax - cmin) /
              static_cast<double>(cmax + cmin);
    return r;
}

std::vector<SvDeltaReport> sv_curve(const BitStream& z, int n_max) {
    if (n_max < 1 || n_max > kMaxNgramBits) throw Error("bad n_max");
    std::vector<SvDeltaReport> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n)
        out.push_back(sv_delta(circular_ngram_distribution(z, n)));
    return out;
}

} // namespace ipikit
