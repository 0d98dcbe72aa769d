#pragma once

// Slow, independent reference computations used only by the tests.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
    const double mu = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - mu) * (x - mu);
    return s / static_cast<double>(xs.size() - 1);
}

/// Largest power of two <= n^tau by brute force over exponents.
inline std::uint64_t power_of_two_floor(std::uint64_t n, double tau) {
    const long double limit = std::pow(static_cast<long double>(n), static_cast<long double>(tau));
    std::uint64_t best = 1;
    for (int k = 1; k < 63; ++k) {
        const std::uint64_t b = std::uint64_t{1} << k;
        if (static_cast<long double>(b) <= limit) best = b;
    }
    return best;
}

/// Batch-means estimate from scratch: consecutive batches of size b,
/// remainder dropped, deviations from the mean of the batch means.
inline double batch_means(const std::vector<double>& xs, std::size_t b) {
    const std::size_t a = xs.size() / b;
    std::vector<double> ys;
    for (std::size_t j = 0; j < a; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < b; ++i) s += xs[j * b + i];
        ys.push_back(s / static_cast<double>(b));
    }
    const double ybar = mean(ys);
    double ss = 0.0;
    for (double y : ys) ss += (y - ybar) * (y - ybar);
    return static_cast<double>(b) * ss / static_cast<double>(a - 1);
}

/// Standard normal quantile by bisection on erfc.
inline double normal_quantile(double p) {
    double lo = -40.0;
    double hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
        (cdf < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double lag1_autocorrelation(const std::vector<double>& xs) {
    const double mu = mean(xs);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        den += (xs[i] - mu) * (xs[i] - mu);
        if (i + 1 < xs.size()) num += (xs[i] - mu) * (xs[i + 1] - mu);
    }
    return num / den;
}

inline double relative_error(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace oracle
