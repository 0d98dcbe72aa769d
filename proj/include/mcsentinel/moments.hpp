#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mcsentinel {

/// Streaming mean and posterior variance of a p-dimensional chain.
///
/// Holds the count, the running mean Z(n) and the running sum of squared
/// deviations (M2) for each coordinate. Samples are folded in one at a time
/// with the single-pass recurrence, so the chain itself is never stored.
/// Two accumulators over disjoint parts of a stream combine with merge().
class MomentAccumulator {
public:
    explicit MomentAccumulator(std::size_t dim);

    /// Adds one draw. Throws DimensionError or NonFiniteError; the
    /// accumulator is unchanged when it throws.
    void push(std::span<const double> x);

    /// Folds another accumulator in, as if its samples had been pushed here.
    void merge(const MomentAccumulator& other);

    [[nodiscard]] std::size_t dim() const noexcept { return mean_.size(); }
    [[nodiscard]] std::uint64_t count() const noexcept { return n_; }

    /// Z(n). Requires count() >= 1.
    [[nodiscard]] const std::vector<double>& mean() const;

    /// M2 / (n - 1). Requires count() >= 2.
    [[nodiscard]] std::vector<double> posterior_variance() const;

    /// Square root of posterior_variance(). Zero is a valid result.
    [[nodiscard]] std::vector<double> posterior_sd() const;

    [[nodiscard]] const std::vector<double>& sq_dev_sum() const noexcept { return m2_; }

private:
    std::uint64_t n_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

/// Throws NonFiniteError if any entry is NaN or infinite.
void require_finite(std::span<const double> x);

}  // namespace mcsentinel
