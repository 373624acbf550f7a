#pragma once

#include <cstdint>
#include <vector>

#include "dpcube/dataset.hpp"
#include "dpcube/partition.hpp"

namespace dpcube {

enum class CountKind { True, Noisy, Consistent };

// Per-node integer counts over a binary partition, stored as one flat array
// per level (index = integer value of the node's bit string). Cheap to scan
// level by level, which is the access pattern of every consumer.
struct CountTree {
    int depth = 0;
    CountKind kind = CountKind::True;
    std::vector<std::vector<std::int64_t>> levels;

    static CountTree zeros(int depth, CountKind kind);

    std::int64_t root() const { return levels[0][0]; }
    std::int64_t at(CellIndex cell) const { return levels[cell.level][cell.bits]; }
    std::int64_t& at(CellIndex cell) { return levels[cell.level][cell.bits]; }

    // True counts are consistent by construction; noisy ones usually are not.
    bool is_consistent() const;
};

// n_theta = number of data points in each cell, all levels. O(n*r) by leaf
// location plus upward aggregation. Rejects out-of-domain points.
CountTree true_counts(const Dataset& data, const BinaryPartition& partition);

}  // namespace dpcube
