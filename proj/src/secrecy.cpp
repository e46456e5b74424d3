#include "ipikit/secrecy.hpp"

#include <algorithm>
#include <cmath>

#include "ipikit/error.hpp"

namespace ipikit {

namespace {

void validate(std::span<const double> p, int n) {
    if (n < 1 || n > kMaxNgramBits) throw Error("bad n");
    if (p.size() != (std::size_t{1} << n))
        throw Error("distribution size does not match 2^n");
    double sum = 0.0;
    for (double x : p) {
        if (x < 0.0) throw Error("invalid distribution: negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error("invalid distribution: probabilities sum to " +
                    std::to_string(sum));
}

} // namespace

double shannon_bits(std::span<const double> p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log2(x);
    return h;
}

double shannon_entropy(std::span<const double> p, int n) {
    validate(p, n);
    return shannon_bits(p) / n;
}

double collision_entropy(std::span<const double> p, int n) {
    validate(p, n);
    double s = 0.0;
    for (double x : p) s += x * x;
    return -std::log2(s) / n;
}

GuessingEntropy guessing_entropy(std::span<const double> p, int n) {
    validate(p, n);
    std::vector<double> sorted(p.begin(), p.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    GuessingEntropy g;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        g.expected_guesses += static_cast<double>(i + 1) * sorted[i];
    // Per-bit success-rate equivalent of the expected guess count. A uniform
    // block has E[G] = (2^n+1)/2, so p_guess = (2^n+1)^{-1/n}, slightly below
    // 1/2; the gap is legitimately negative there and tends to 0 as n grows.
    g.p_guess = std::exp2(-(1.0 + std::log2(g.expected_guesses)) / n);
    g.gap = g.p_guess - 0.5;
    return g;
}

double min_entropy(std::span<const double> p, int n) {
    validate(p, n);
    const double pmax = *std::max_element(p.begin(), p.end());
    if (pmax <= 0.0) throw Error("empty distribution");
    return -std::log2(pmax) / n;
}

double l1_uniform_distance(std::span<const double> p, int n) {
    validate(p, n);
    const double u = 1.0 / static_cast<double>(p.size());
    double d = 0.0;
    for (double x : p) d += std::abs(x - u);
    return d;
}

EntropyReport entropy_report(const NgramDistribution& d) {
    const auto p = probabilities(d);
    EntropyReport r;
    r.n = d.n;
    r.shannon_rate = shannon_entropy(p, d.n);
    r.collision_rate = collision_entropy(p, d.n);
    r.guessing_gap = guessing_entropy(p, d.n).gap;
    r.min_entropy_rate = min_entropy(p, d.n);
    r.l1_distance = l1_uniform_distance(p, d.n);
    return r;
}

std::vector<EntropyReport> full_report(const BitStream& z, int n_max) {
    if (n_max < 1 || n_max > kMaxNgramBits) throw Error("bad n_max");
    std::vector<EntropyReport> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n)
        out.push_back(entropy_report(circular_ngram_distribution(z, n)));
    return out;
}

} // namespace ipikit
