#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace dpcube {

// Ordered multiset of points in [0,1]^d, stored row-major.
struct Dataset {
    int dim = 1;
    std::vector<double> coords;

    Dataset() = default;
    explicit Dataset(int d) : dim(d) {
        if (d < 1) throw std::invalid_argument("Dataset: dimension must be >= 1");
    }

    std::size_t size() const { return dim > 0 ? coords.size() / dim : 0; }
    bool empty() const { return coords.empty(); }

    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
    }

    void push(std::span<const double> p) {
        if (static_cast<int>(p.size()) != dim) {
            throw std::invalid_argument("Dataset: point dimension mismatch");
        }
        coords.insert(coords.end(), p.begin(), p.end());
    }

    void push(std::initializer_list<double> p) {
        push(std::span<const double>(p.begin(), p.size()));
    }
};

}  // namespace dpcube
