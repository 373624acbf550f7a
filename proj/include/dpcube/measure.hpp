#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dpcube/dataset.hpp"

namespace dpcube {

// Finitely supported signed measure: support points (row-major) with real
// weights that may be negative and need not sum to 1.
struct DiscreteSignedMeasure {
    int dim = 1;
    std::vector<double> support;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }

    std::span<const double> point(std::size_t i) const {
        return {support.data() + i * dim, static_cast<std::size_t>(dim)};
    }

    void push(std::span<const double> p, double w) {
        support.insert(support.end(), p.begin(), p.end());
        weights.push_back(w);
    }

    void push(std::initializer_list<double> p, double w) {
        push(std::span<const double>(p.begin(), p.size()), w);
    }

    double total_mass() const;
    bool is_probability(double tol = 1e-9) const;
};

// Uniform empirical measure of a dataset, with exactly equal points merged.
DiscreteSignedMeasure empirical_measure(const Dataset& data);

// Rewrites two measures over their common support (union of the two support
// sets, matched by exact coordinate equality).
std::pair<DiscreteSignedMeasure, DiscreteSignedMeasure> on_common_support(
    const DiscreteSignedMeasure& a, const DiscreteSignedMeasure& b);

double linf_distance(std::span<const double> a, std::span<const double> b);

}  // namespace dpcube
