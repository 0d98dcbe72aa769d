#include "mcsentinel/batch_means.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "mcsentinel/error.hpp"
#include "mcsentinel/moments.hpp"

namespace mcsentinel {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool is_half(double tau) { return tau == 0.5; }

}  // namespace

void validate_tau(double tau) {
    if (!(tau > 1.0 / 3.0 && tau < 1.0)) {
        throw InvalidArgument("tau must lie in (1/3, 1), got " + std::to_string(tau));
    }
}

std::uint64_t target_batch_size(std::uint64_t n, double tau) {
    if (n < 4) throw InsufficientDataError("batch size undefined for n < 4");
    if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau must lie in (0, 1)");
    if (is_half(tau)) {
        // 2^k <= sqrt(n)  <=>  4^k <= n
        return std::bit_floor(isqrt(n));
    }
    const long double limit = std::pow(static_cast<long double>(n), static_cast<long double>(tau));
    std::uint64_t b = 2;
    while (static_cast<long double>(2 * b) <= limit) b *= 2;
    return b;
}

std::uint64_t ubm_batch_size(std::uint64_t n, double tau) {
    if (is_half(tau)) return isqrt(n);
    return static_cast<std::uint64_t>(
        std::floor(std::pow(static_cast<long double>(n), static_cast<long double>(tau))));
}

DoublingBatchMeans::DoublingBatchMeans(std::size_t dim, double tau)
    : dim_(dim), tau_(tau), partial_sum_(dim, 0.0) {
    if (dim == 0) throw InvalidArgument("dimension must be at least 1");
    validate_tau(tau);
}

void DoublingBatchMeans::push(std::span<const double> x) {
    if (x.size() != dim_) {
        throw DimensionError("sample has " + std::to_string(x.size()) + " coordinates, expected " +
                             std::to_string(dim_));
    }
    require_finite(x);
    for (std::size_t i = 0; i < dim_; ++i) partial_sum_[i] += x[i];
    ++partial_count_;
    ++n_;
    if (partial_count_ == batch_size_) complete_batch();
}

void DoublingBatchMeans::complete_batch() {
    const double inv_b = 1.0 / static_cast<double>(batch_size_);
    for (std::size_t i = 0; i < dim_; ++i) {
        batch_means_.push_back(partial_sum_[i] * inv_b);
        partial_sum_[i] = 0.0;
    }
    partial_count_ = 0;
    while (n_ >= 4 && target_batch_size(n_, tau_) >= 2 * batch_size_ &&
           completed_batches() >= 2 && completed_batches() % 2 == 0) {
        merge_pairs();
    }
}

void DoublingBatchMeans::merge_pairs() {
    const std::size_t half = completed_batches() / 2;
    for (std::size_t j = 0; j < half; ++j) {
        const double* a = batch_means_.data() + (2 * j) * dim_;
        const double* b = a + dim_;
        double* out = batch_means_.data() + j * dim_;
        for (std::size_t i = 0; i < dim_; ++i) out[i] = 0.5 * (a[i] + b[i]);
    }
    batch_means_.resize(half * dim_);
    batch_size_ *= 2;
}

std::vector<double> DoublingBatchMeans::sigma2() const {
    const std::size_t a = completed_batches();
    if (a < 2) {
        throw InsufficientDataError("batch-means estimate needs 2 completed batches, have " +
                                    std::to_string(a));
    }
    std::vector<double> grand(dim_, 0.0);
    for (std::size_t j = 0; j < a; ++j) {
        const double* y = batch_means_.data() + j * dim_;
        for (std::size_t i = 0; i < dim_; ++i) grand[i] += y[i];
    }
    for (auto& g : grand) g /= static_cast<double>(a);
    std::vector<double> out(dim_, 0.0);
    for (std::size_t j = 0; j < a; ++j) {
        const double* y = batch_means_.data() + j * dim_;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double d = y[i] - grand[i];
            out[i] += d * d;
        }
    }
    const double scale = static_cast<double>(batch_size_) / static_cast<double>(a - 1);
    for (auto& v : out) v *= scale;
    return out;
}

DoublingBatchMeans DoublingBatchMeans::restore(std::size_t dim, double tau, std::uint64_t n,
                                               std::uint64_t batch_size,
                                               std::vector<double> batch_means,
                                               std::vector<double> partial_sum,
                                               std::uint64_t partial_count) {
    DoublingBatchMeans s(dim, tau);
    if (batch_size < 2 || !std::has_single_bit(batch_size)) {
        throw FormatError("batch size must be a power of two >= 2");
    }
    if (batch_means.size() % dim != 0 || partial_sum.size() != dim) {
        throw FormatError("batch storage does not match dimension");
    }
    if (partial_count >= batch_size) throw FormatError("partial batch is not smaller than batch size");
    const std::uint64_t completed = batch_means.size() / dim;
    if (n != batch_size * completed + partial_count) {
        throw FormatError("sample count inconsistent with batch bookkeeping");
    }
    s.n_ = n;
    s.batch_size_ = batch_size;
    s.batch_means_ = std::move(batch_means);
    s.partial_sum_ = std::move(partial_sum);
    s.partial_count_ = partial_count;
    return s;
}

std::vector<double> batch_means_sigma2(const ChainMatrix& chain, std::size_t batch_size) {
    const std::size_t p = chain.dim();
    if (batch_size == 0) throw InvalidArgument("batch size must be positive");
    const std::size_t a = chain.rows() / batch_size;
    if (a < 2) throw InsufficientDataError("fewer than 2 batches of size " + std::to_string(batch_size));

    std::vector<double> means(a * p, 0.0);
    const auto& v = chain.values();
    for (std::size_t j = 0; j < a; ++j) {
        double* y = means.data() + j * p;
        for (std::size_t r = j * batch_size; r < (j + 1) * batch_size; ++r) {
            const double* x = v.data() + r * p;
            for (std::size_t i = 0; i < p; ++i) y[i] += x[i];
        }
        for (std::size_t i = 0; i < p; ++i) y[i] /= static_cast<double>(batch_size);
    }
    std::vector<double> grand(p, 0.0);
    for (std::size_t j = 0; j < a; ++j)
        for (std::size_t i = 0; i < p; ++i) grand[i] += means[j * p + i];
    for (auto& g : grand) g /= static_cast<double>(a);
    std::vector<double> out(p, 0.0);
    for (std::size_t j = 0; j < a; ++j)
        for (std::size_t i = 0; i < p; ++i) {
            const double d = means[j * p + i] - grand[i];
            out[i] += d * d;
        }
    const double scale = static_cast<double>(batch_size) / static_cast<double>(a - 1);
    for (auto& o : out) o *= scale;
    return out;
}

double batch_means_sigma2(std::span<const double> series, std::size_t batch_size) {
    if (batch_size == 0) throw InvalidArgument("batch size must be positive");
    const std::size_t a = series.size() / batch_size;
    if (a < 2) throw InsufficientDataError("fewer than 2 batches of size " + std::to_string(batch_size));
    std::vector<double> means(a, 0.0);
    for (std::size_t j = 0; j < a; ++j) {
        double s = 0.0;
        for (std::size_t r = j * batch_size; r < (j + 1) * batch_size; ++r) s += series[r];
        means[j] = s / static_cast<double>(batch_size);
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= static_cast<double>(a);
    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    return ss * static_cast<double>(batch_size) / static_cast<double>(a - 1);
}

std::vector<double> ubm_sigma2(const ChainMatrix& chain, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau must lie in (0, 1)");
    const std::uint64_t n = chain.rows();
    if (n < 4) throw InsufficientDataError("usual batch means needs at least 4 samples");
    const std::uint64_t b = ubm_batch_size(n, tau);
    if (b == 0 || n / b < 2) throw InsufficientDataError("fewer than 2 batches available");
    return batch_means_sigma2(chain, static_cast<std::size_t>(b));
}

}  // namespace mcsentinel
