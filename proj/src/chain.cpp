#include "mcsentinel/chain.hpp"

#include <string>

#include "mcsentinel/error.hpp"

namespace mcsentinel {

ChainMatrix::ChainMatrix(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
    if (dim_ == 0 || values_.size() % dim_ != 0) {
        throw DimensionError("chain storage is not a whole number of rows");
    }
}

void ChainMatrix::append(std::span<const double> row) {
    if (row.size() != dim_) {
        throw DimensionError("row has " + std::to_string(row.size()) + " values, expected " +
                             std::to_string(dim_));
    }
    values_.insert(values_.end(), row.begin(), row.end());
}

std::vector<double> ChainMatrix::column(std::size_t j) const {
    if (j >= dim_) throw DimensionError("column index out of range");
    std::vector<double> out;
    out.reserve(rows());
    for (std::size_t i = j; i < values_.size(); i += dim_) out.push_back(values_[i]);
    return out;
}

}  // namespace mcsentinel
