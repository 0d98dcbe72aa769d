#include "mcsentinel/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "mcsentinel/batch_means.hpp"
#include "mcsentinel/error.hpp"
#include "mcsentinel/normal.hpp"

namespace mcsentinel {

namespace {

void require_same_size(std::size_t a, std::size_t b) {
    if (a != b) throw DimensionError("vector lengths differ");
}

struct Centered {
    std::vector<double> values;
    double c0 = 0.0;  // sum of squares
};

Centered center(std::span<const double> series) {
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(series.size());
    Centered out;
    out.values.reserve(series.size());
    for (double x : series) {
        out.values.push_back(x - mean);
        out.c0 += (x - mean) * (x - mean);
    }
    return out;
}

double lag_product(const std::vector<double>& d, std::size_t k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < d.size(); ++t) s += d[t] * d[t + k];
    return s;
}

double sample_variance(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(x.size() - 1);
}

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double segment_spectrum_at_zero(std::span<const double> x) {
    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x.size())));
    std::uint64_t b = std::bit_floor(root);
    while ((b * 2) * (b * 2) <= x.size()) b *= 2;
    while (b * b > x.size()) b /= 2;
    return batch_means_sigma2(x, static_cast<std::size_t>(b));
}

}  // namespace

std::vector<double> ess_ratio(std::uint64_t n, std::span<const double> lambda2,
                              std::span<const double> sigma2) {
    require_same_size(lambda2.size(), sigma2.size());
    std::vector<double> out(lambda2.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(sigma2[i] > 0.0)) {
            throw DegenerateError("zero asymptotic variance at coordinate " + std::to_string(i));
        }
        out[i] = static_cast<double>(n) * lambda2[i] / sigma2[i];
    }
    return out;
}

CappedEss cap_ess(double ess, std::uint64_t n) {
    const double dn = static_cast<double>(n);
    return {std::clamp(ess, 0.0, 2.0 * dn), ess > dn};
}

std::vector<double> autocorrelations(std::span<const double> series, std::size_t max_lag) {
    if (series.size() < 2) throw InsufficientDataError("autocorrelation needs 2 samples");
    const Centered c = center(series);
    if (c.c0 == 0.0) throw DegenerateError("zero-variance series");
    max_lag = std::min(max_lag, series.size() - 1);
    std::vector<double> rho(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) rho[k] = lag_product(c.values, k) / c.c0;
    return rho;
}

double ess_acf(std::span<const double> series) {
    if (series.size() < 10) throw InsufficientDataError("ESS needs at least 10 samples");
    const Centered c = center(series);
    if (c.c0 == 0.0) throw DegenerateError("zero-variance series");
    const std::size_t n = series.size();
    double sum = 0.0;
    for (std::size_t k = 1; k + 1 < n; k += 2) {
        const double pair = (lag_product(c.values, k) + lag_product(c.values, k + 1)) / c.c0;
        if (!(pair > 0.0)) break;
        sum += pair;
    }
    return static_cast<double>(n) / (1.0 + 2.0 * sum);
}

std::optional<double> geweke_z(std::span<const double> series, double frac1, double frac2) {
    if (!(frac1 > 0.0 && frac2 > 0.0 && frac1 + frac2 <= 1.0)) {
        throw InvalidArgument("Geweke fractions must be positive with frac1 + frac2 <= 1");
    }
    const std::size_t n = series.size();
    const auto n1 = static_cast<std::size_t>(std::floor(frac1 * static_cast<double>(n)));
    const auto n2 = static_cast<std::size_t>(std::floor(frac2 * static_cast<double>(n)));
    if (n1 < 16 || n2 < 16) {
        throw InvalidArgument("Geweke segments need at least 16 samples each (have " +
                              std::to_string(n1) + " and " + std::to_string(n2) + ")");
    }
    const auto first = series.subspan(0, n1);
    const auto last = series.subspan(n - n2, n2);
    if (sample_variance(first) == 0.0 || sample_variance(last) == 0.0) return std::nullopt;

    const double s1 = segment_spectrum_at_zero(first);
    const double s2 = segment_spectrum_at_zero(last);
    const double se2 = s1 / static_cast<double>(n1) + s2 / static_cast<double>(n2);
    if (!(se2 > 0.0)) return std::nullopt;
    return (mean_of(first) - mean_of(last)) / std::sqrt(se2);
}

GewekeResult geweke_converged(const ChainMatrix& chain, double alpha, double frac1, double frac2) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    GewekeResult r;
    r.alpha = alpha;
    r.frac1 = frac1;
    r.frac2 = frac2;
    const auto n = static_cast<double>(chain.rows());
    r.n1 = static_cast<std::size_t>(std::floor(frac1 * n));
    r.n2 = static_cast<std::size_t>(std::floor(frac2 * n));
    r.converged = true;
    for (std::size_t j = 0; j < chain.dim(); ++j) {
        const auto column = chain.column(j);
        auto z = geweke_z(column, frac1, frac2);
        r.z.push_back(z);
        if (!z) {
            r.passed.emplace_back(std::nullopt);
            ++r.undetermined;
            continue;
        }
        const bool ok = two_sided_p_value(*z) >= alpha;
        r.passed.emplace_back(ok);
        r.converged = r.converged && ok;
    }
    return r;
}

std::vector<double> quality_ratios(std::span<const double> widths,
                                   std::span<const double> lambda_hat) {
    require_same_size(widths.size(), lambda_hat.size());
    std::vector<double> out(widths.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(lambda_hat[i] > 0.0)) {
            throw DegenerateError("zero posterior sd at coordinate " + std::to_string(i));
        }
        out[i] = widths[i] / lambda_hat[i];
    }
    return out;
}

}  // namespace mcsentinel
