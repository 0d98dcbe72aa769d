#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mcsentinel/chain.hpp"

namespace mcsentinel {

inline constexpr double kDefaultTau = 0.5;

/// Largest power of two not exceeding n^tau, with a floor of 2.
///
/// Requires n >= 4 and 0 < tau < 1. For tau = 1/2 the result is computed
/// in exact integer arithmetic, so it doubles precisely at n = 4 * 4^k.
[[nodiscard]] std::uint64_t target_batch_size(std::uint64_t n, double tau = kDefaultTau);

/// Rejects tau outside (1/3, 1).
void validate_tau(double tau);

/// Streaming batch-means estimator with power-of-two batch sizes.
///
/// Only the completed batch means and the running sum of the current
/// partial batch are stored. When the target batch size doubles, adjacent
/// batch means are averaged in pairs, so storage stays O(n^(1 - tau)).
/// Doubling is only evaluated at batch boundaries and only when the number
/// of completed batches is even; otherwise it waits for the next boundary.
class DoublingBatchMeans {
public:
    explicit DoublingBatchMeans(std::size_t dim, double tau = kDefaultTau);

    /// Throws DimensionError or NonFiniteError; state is unchanged when it throws.
    void push(std::span<const double> x);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] std::uint64_t count() const noexcept { return n_; }
    [[nodiscard]] std::uint64_t batch_size() const noexcept { return batch_size_; }
    [[nodiscard]] std::size_t completed_batches() const noexcept {
        return batch_means_.size() / dim_;
    }
    [[nodiscard]] std::uint64_t partial_count() const noexcept { return partial_count_; }
    /// True right after a batch was completed (no samples in the partial batch).
    [[nodiscard]] bool at_batch_boundary() const noexcept { return partial_count_ == 0 && n_ > 0; }

    [[nodiscard]] std::span<const double> batch_mean(std::size_t j) const {
        return {batch_means_.data() + j * dim_, dim_};
    }
    [[nodiscard]] const std::vector<double>& batch_means() const noexcept { return batch_means_; }
    [[nodiscard]] const std::vector<double>& partial_sum() const noexcept { return partial_sum_; }

    /// b/(a-1) * sum_j (Y_j - Ybar)^2 over completed batches only.
    /// Throws InsufficientDataError with fewer than 2 completed batches.
    [[nodiscard]] std::vector<double> sigma2() const;

    /// Rebuilds a state from its stored fields (checkpoint restore).
    static DoublingBatchMeans restore(std::size_t dim, double tau, std::uint64_t n,
                                      std::uint64_t batch_size, std::vector<double> batch_means,
                                      std::vector<double> partial_sum,
                                      std::uint64_t partial_count);

private:
    void complete_batch();
    void merge_pairs();

    std::size_t dim_;
    double tau_;
    std::uint64_t n_ = 0;
    std::uint64_t batch_size_ = 2;
    std::vector<double> batch_means_;  // completed batches, row-major
    std::vector<double> partial_sum_;
    std::uint64_t partial_count_ = 0;
};

/// Batch-means estimate with a fixed batch size over consecutive batches
/// from the start of the chain; a trailing remainder is discarded.
[[nodiscard]] std::vector<double> batch_means_sigma2(const ChainMatrix& chain,
                                                     std::size_t batch_size);

/// Scalar-series version of batch_means_sigma2().
[[nodiscard]] double batch_means_sigma2(std::span<const double> series, std::size_t batch_size);

/// floor(n^tau), exact for tau = 1/2.
[[nodiscard]] std::uint64_t ubm_batch_size(std::uint64_t n, double tau = kDefaultTau);

/// Usual batch means: batch size floor(n^tau), a = floor(n / b) batches.
/// Requires the whole chain and a >= 2.
[[nodiscard]] std::vector<double> ubm_sigma2(const ChainMatrix& chain, double tau = kDefaultTau);

}  // namespace mcsentinel
