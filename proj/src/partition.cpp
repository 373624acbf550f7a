#include "dpcube/partition.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dpcube {

BinaryPartition::BinaryPartition(int dim, int depth) : dim_(dim), depth_(depth) {
    if (dim < 1) throw std::invalid_argument("BinaryPartition: dim must be >= 1");
    if (depth < 0) throw std::invalid_argument("BinaryPartition: depth must be >= 0");
    if (depth > 62) throw std::invalid_argument("BinaryPartition: depth > 62 would overflow cell indices");
}

double BinaryPartition::cell_diameter(int level) const {
    if (level < 0 || level > depth_) throw std::invalid_argument("cell_diameter: level out of range");
    return std::ldexp(1.0, -(level / dim_));
}

std::vector<double> BinaryPartition::delta_levels() const {
    // Delta_j = 2^j * diam(level j); the extra leading entry carries the
    // j = -1 convention Delta_{-1} = Delta_0 = diam(domain).
    std::vector<double> deltas(static_cast<std::size_t>(depth_) + 2);
    deltas[0] = 1.0;
    for (int j = 0; j <= depth_; ++j) {
        deltas[static_cast<std::size_t>(j) + 1] = std::ldexp(1.0, j - j / dim_);
    }
    return deltas;
}

void BinaryPartition::check_cell(CellIndex cell) const {
    if (cell.level < 0 || cell.level > depth_) {
        throw std::invalid_argument("BinaryPartition: cell level out of range");
    }
    if (cell.level < 64 && (cell.bits >> cell.level) != 0) {
        throw std::invalid_argument("BinaryPartition: cell bits exceed level");
    }
}

CellBox BinaryPartition::cell_bounds(CellIndex cell) const {
    check_cell(cell);
    CellBox box;
    box.lo.assign(dim_, 0.0);
    box.hi.assign(dim_, 1.0);
    for (int t = 0; t < cell.level; ++t) {
        const int axis = t % dim_;
        const int bit = static_cast<int>((cell.bits >> (cell.level - 1 - t)) & 1);
        const double mid = 0.5 * (box.lo[axis] + box.hi[axis]);
        if (bit == 0) {
            box.hi[axis] = mid;
        } else {
            box.lo[axis] = mid;
        }
    }
    return box;
}

CellIndex BinaryPartition::locate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) {
        throw std::invalid_argument("locate: point dimension mismatch");
    }
    // Under cyclic halving with exact dyadic midpoints, the level-t bit is
    // the (t/d)-th binary digit of coordinate (t mod d); half-open splits
    // mean x == mid takes the upper half, and x == 1 clamps to the last cell.
    CellIndex cell;
    cell.level = depth_;
    for (int t = 0; t < depth_; ++t) {
        const int axis = t % dim_;
        if (t < dim_ && !(x[axis] >= 0.0 && x[axis] <= 1.0)) {
            throw std::invalid_argument("locate: coordinate " + std::to_string(axis) +
                                        " outside [0,1]");
        }
        const int halvings = t / dim_ + 1;
        const double scaled = std::ldexp(x[axis], halvings);
        auto cut = static_cast<std::uint64_t>(scaled);
        cut = std::min(cut, (std::uint64_t{1} << halvings) - 1);
        cell.bits = (cell.bits << 1) | (cut & 1);
    }
    // Axes beyond the depth still need domain validation.
    for (int axis = std::min(dim_, depth_); axis < dim_; ++axis) {
        if (!(x[axis] >= 0.0 && x[axis] <= 1.0)) {
            throw std::invalid_argument("locate: coordinate " + std::to_string(axis) +
                                        " outside [0,1]");
        }
    }
    return cell;
}

std::vector<double> BinaryPartition::representative(CellIndex cell) const {
    const CellBox box = cell_bounds(cell);
    std::vector<double> center(dim_);
    for (int axis = 0; axis < dim_; ++axis) {
        center[axis] = 0.5 * (box.lo[axis] + box.hi[axis]);
    }
    return center;
}

}  // namespace dpcube
