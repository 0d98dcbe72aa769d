#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mcsentinel {

/// A fully stored chain, row-major: one row of `dim` values per iteration.
class ChainMatrix {
public:
    explicit ChainMatrix(std::size_t dim) : dim_(dim) {}
    ChainMatrix(std::size_t dim, std::vector<double> values);

    void append(std::span<const double> row);
    void reserve(std::size_t rows) { values_.reserve(rows * dim_); }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t rows() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * dim_, dim_};
    }
    /// Copy of one coordinate's trace.
    [[nodiscard]] std::vector<double> column(std::size_t j) const;
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

private:
    std::size_t dim_;
    std::vector<double> values_;
};

}  // namespace mcsentinel
