#pragma once

#include <stdexcept>
#include <string>

namespace cverr {

// Matrix/vector shapes do not line up.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A design-matrix column is numerically dependent on the preceding columns.
struct RankDeficiencyError : std::runtime_error {
    explicit RankDeficiencyError(int column_index)
        : std::runtime_error("rank deficiency: column " + std::to_string(column_index) +
                             " is linearly dependent on the preceding columns"),
          column(column_index) {}
    int column;
};

// Malformed input data: unreadable files, ragged CSV rows, non-numeric fields.
struct DataFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the operation's domain (negative sigma, zero trials, ...).
struct InvalidArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace cverr
