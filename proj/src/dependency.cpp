#include "ipikit/dependency.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "ipikit/error.hpp"
#include "ipikit/rng.hpp"

namespace ipikit {

namespace {

// Plug-in entropy straight from integer counts. Both marginal and joint
// entropies go through this one routine with the same total, so a stream
// compared against itself yields h_xy identical to h_x down to the last bit
// (the nonzero terms appear in the same order with the same values).
double entropy_from_counts(std::span<const std::uint64_t> counts,
                           std::uint64_t total) {
    const double t = static_cast<double>(total);
    double h = 0.0;
    for (std::uint64_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / t;
        h -= p * std::log2(p);
    }
    return h;
}

bool stream_less(const BitStream& a, const BitStream& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    const auto& wa = a.words();
    const auto& wb = b.words();
    for (std::size_t i = 0; i < wa.size(); ++i)
        if (wa[i] != wb[i]) return wa[i] < wb[i];
    return false;
}

} // namespace

JointDistribution joint_distribution(const BitStream& x, const BitStream& y,
                                     int n) {
    if (n < 1 || n > kMaxJointBits)
        throw Error("bad n (want 1.." + std::to_string(kMaxJointBits) + ")");
    const std::size_t len = std::min(x.size(), y.size());
    if (len < static_cast<std::size_t>(n))
        throw Error("too short: aligned length " + std::to_string(len));
    const std::size_t blocks = len / n;
    JointDistribution d;
    d.n = n;
    d.counts.assign(std::size_t{1} << (2 * n), 0);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::uint64_t xw = x.window(b * n, n);
        const std::uint64_t yw = y.window(b * n, n);
        ++d.counts[(xw << n) | yw];
    }
    d.total = blocks;
    return d;
}

DependencyReport e_indp(const BitStream& x, const BitStream& y, int n) {
    // Canonical orientation: compute on the lexicographically smaller stream
    // first so that e_indp(x, y) and e_indp(y, x) run the identical float
    // program and agree exactly; only the h_x / h_y labels are swapped back.
    const bool swapped = stream_less(y, x);
    const BitStream& a = swapped ? y : x;
    const BitStream& b = swapped ? x : y;

    const JointDistribution joint = joint_distribution(a, b, n);
    const std::size_t side = std::size_t{1} << n;
    std::vector<std::uint64_t> row(side, 0), col(side, 0);
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j) {
            const std::uint64_t c = joint.counts[(i << n) | j];
            row[i] += c;
            col[j] += c;
        }

    DependencyReport r;
    r.n = n;
    const double h_a = entropy_from_counts(row, joint.total);
    const double h_b = entropy_from_counts(col, joint.total);
    r.h_xy = entropy_from_counts(joint.counts, joint.total);
    r.h_x = swapped ? h_b : h_a;
    r.h_y = swapped ? h_a : h_b;
    r.e_indp = h_a + h_b - r.h_xy;
    return r;
}

double interpolated_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error("empty distribution");
    if (!(q >= 0.0 && q <= 1.0)) throw Error("bad quantile");
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    return lo + 1 < sorted.size()
               ? sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
               : sorted[lo];
}

PairSampleSummary pair_sampling(std::span<const IpiSeries> subjects,
                                std::size_t trials, std::size_t min_length,
                                int n, std::uint64_t seed) {
    if (trials == 0) throw Error("config: trials must be positive");

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < subjects.size(); ++i)
        if (subjects[i].values.size() >= min_length) eligible.push_back(i);
    if (eligible.size() < 2)
        throw Error("insufficient subjects: " + std::to_string(eligible.size()) +
                    " meet the minimum length " + std::to_string(min_length));

    std::vector<BitStream> streams(eligible.size());
    for (std::size_t e = 0; e < eligible.size(); ++e) {
        const auto norm = normalize_series(subjects[eligible[e]]);
        streams[e] = concat_series(norm, 2);
    }

    PairSampleSummary s;
    s.trials = trials;
    s.n = n;
    s.all.reserve(trials);
    std::map<std::pair<std::size_t, std::size_t>, double> cache;
    for (std::size_t t = 0; t < trials; ++t) {
        SplitMix64 g(derive_seed(seed, t));
        const std::size_t i = g.below(eligible.size());
        std::size_t j = g.below(eligible.size() - 1);
        if (j >= i) ++j;
        const auto key = std::minmax(i, j);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, e_indp(streams[i], streams[j], n).e_indp)
                     .first;
        s.all.push_back({t, subjects[eligible[i]].subject_id,
                         subjects[eligible[j]].subject_id, it->second});
    }

    std::vector<double> v;
    v.reserve(trials);
    for (const auto& tr : s.all) v.push_back(tr.e_indp);
    std::sort(v.begin(), v.end());
    s.min = v.front();
    s.q1 = interpolated_quantile(v, 0.25);
    s.median = interpolated_quantile(v, 0.5);
    s.q3 = interpolated_quantile(v, 0.75);
    s.max = v.back();
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());

    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr, hi_fence = s.q3 + 1.5 * iqr;
    for (const auto& tr : s.all)
        if (tr.e_indp < lo_fence || tr.e_indp > hi_fence)
            s.outliers.push_back(tr);
    return s;
}

} // namespace ipikit
