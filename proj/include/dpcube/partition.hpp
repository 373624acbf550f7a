#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dpcube {

// Node of the binary hierarchical partition, identified by the bit string of
// halving choices from the root. bits holds the string MSB-first in the low
// `level` bits; the root is the empty string at level 0.
struct CellIndex {
    int level = 0;
    std::uint64_t bits = 0;

    bool operator==(const CellIndex&) const = default;

    CellIndex child(int side) const {
        return {level + 1, (bits << 1) | static_cast<std::uint64_t>(side)};
    }
    CellIndex parent() const { return {level - 1, bits >> 1}; }
};

struct CellBox {
    std::vector<double> lo;
    std::vector<double> hi;
};

// Canonical binary hierarchical partition of [0,1]^d under the l-infinity
// metric: level j halves coordinate (j mod d) through the middle. Cells are
// half-open except at the upper domain boundary, so every point of the cube
// lies in exactly one leaf. Geometry is computed on demand from the index
// bits; nothing per-cell is stored.
class BinaryPartition {
public:
    BinaryPartition(int dim, int depth);

    int dim() const { return dim_; }
    int depth() const { return depth_; }
    std::uint64_t leaf_count() const { return std::uint64_t{1} << depth_; }

    // l-infinity diameter of any level-j cell: 2^(-floor(j/d)).
    double cell_diameter(int level) const;
    // Leaf diameter: the partition's resolution.
    double resolution() const { return cell_diameter(depth_); }

    // Sum of level-j cell diameters for j = -1 .. depth (front entry is the
    // j = -1 convention, equal to diam of the whole domain).
    std::vector<double> delta_levels() const;

    CellBox cell_bounds(CellIndex cell) const;

    // Leaf containing x; rejects coordinates outside [0,1].
    CellIndex locate(std::span<const double> x) const;

    // Cell center: deterministic and data-independent.
    std::vector<double> representative(CellIndex cell) const;

private:
    void check_cell(CellIndex cell) const;

    int dim_;
    int depth_;
};

}  // namespace dpcube
