#pragma once

#include <stdexcept>
#include <string>

#include "dpcube/dataset.hpp"

namespace dpcube {

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Parses a CSV of d numeric columns into points. With normalize, each
// column is min-max scaled to [0,1] (a constant column maps to 0.5); without
// it, out-of-range values are rejected, naming the row and column.
// expected_dim 0 infers the dimension from the first row.
Dataset read_csv_dataset(const std::string& path, int expected_dim, bool normalize);

// One row per point, columns with round-trip precision. Byte-stable for
// identical inputs.
void write_csv_dataset(const std::string& path, const Dataset& data);

}  // namespace dpcube
