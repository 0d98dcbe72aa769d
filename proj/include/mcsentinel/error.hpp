#pragma once

#include <stdexcept>
#include <string>

namespace mcsentinel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sample or accumulator had the wrong number of coordinates.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A NaN or infinite value was offered to an accumulator.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// Not enough samples (or batches) for the requested estimate.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// An argument is outside its admissible range.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The estimate is undefined because a coordinate has zero variance.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Malformed chain file or report.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace mcsentinel
