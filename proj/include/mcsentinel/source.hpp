#pragma once

#include <cstddef>
#include <span>

namespace mcsentinel {

/// Pull interface for chain draws.
class SampleSource {
public:
    virtual ~SampleSource() = default;

    [[nodiscard]] virtual std::size_t dim() const = 0;

    /// Writes the next draw into `out` (size dim()). Returns false once the
    /// stream is exhausted, leaving `out` unspecified.
    virtual bool next(std::span<double> out) = 0;
};

}  // namespace mcsentinel
