#include "mcsentinel/moments.hpp"

#include <cmath>
#include <string>

#include "mcsentinel/error.hpp"

namespace mcsentinel {

void require_finite(std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            throw NonFiniteError("non-finite value at coordinate " + std::to_string(i));
        }
    }
}

MomentAccumulator::MomentAccumulator(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {
    if (dim == 0) throw InvalidArgument("dimension must be at least 1");
}

void MomentAccumulator::push(std::span<const double> x) {
    if (x.size() != dim()) {
        throw DimensionError("sample has " + std::to_string(x.size()) + " coordinates, expected " +
                             std::to_string(dim()));
    }
    require_finite(x);
    ++n_;
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double delta = x[i] - mean_[i];
        mean_[i] += delta * inv_n;
        m2_[i] += delta * (x[i] - mean_[i]);
    }
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.dim() != dim()) {
        throw DimensionError("cannot merge accumulators of dimension " + std::to_string(dim()) +
                             " and " + std::to_string(other.dim()));
    }
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double total = na + nb;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double delta = other.mean_[i] - mean_[i];
        mean_[i] += delta * (nb / total);
        m2_[i] += other.m2_[i] + delta * delta * (na * nb / total);
    }
    n_ += other.n_;
}

const std::vector<double>& MomentAccumulator::mean() const {
    if (n_ == 0) throw InsufficientDataError("mean of an empty accumulator");
    return mean_;
}

std::vector<double> MomentAccumulator::posterior_variance() const {
    if (n_ < 2) throw InsufficientDataError("posterior variance needs at least 2 samples");
    std::vector<double> out(dim());
    const double denom = static_cast<double>(n_ - 1);
    for (std::size_t i = 0; i < dim(); ++i) out[i] = m2_[i] / denom;
    return out;
}

std::vector<double> MomentAccumulator::posterior_sd() const {
    auto out = posterior_variance();
    for (auto& v : out) v = std::sqrt(v);
    return out;
}

}  // namespace mcsentinel
