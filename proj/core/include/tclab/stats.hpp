#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tclab/errors.hpp"

namespace tclab {

// Pairwise summation with a fixed reduction tree. The tree depends only on
// the element count, so sums are bit-reproducible for a given input order.
inline double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

struct SummaryStats {
    double mean = 0.0;
    double standard_error = 0.0;
};

inline SummaryStats summary_stats(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw InvalidArgument("summary_stats: need at least 2 samples");
    SummaryStats out;
    out.mean = pairwise_sum(samples) / static_cast<double>(n);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = samples[i] - out.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
    out.standard_error = std::sqrt(var / static_cast<double>(n));
    return out;
}

// Two-sample Kolmogorov-Smirnov statistic: sup over the merged sample grid
// of |F_a - F_b|. Inputs must be sorted ascending.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: empty sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double sup = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        const double diff = std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb);
        if (diff > sup) sup = diff;
    }
    return sup;
}

// Rejection threshold c(alpha) * sqrt((n+m)/(n*m)).
inline double ks_threshold(double alpha, std::size_t n, std::size_t m) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    return c * std::sqrt((dn + dm) / (dn * dm));
}

}  // namespace tclab
