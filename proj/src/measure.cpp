#include "dpcube/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace dpcube {

double DiscreteSignedMeasure::total_mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

bool DiscreteSignedMeasure::is_probability(double tol) const {
    for (double w : weights) {
        if (w < -tol) return false;
    }
    return std::abs(total_mass() - 1.0) <= tol;
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

namespace {

std::vector<double> key_of(std::span<const double> p) { return {p.begin(), p.end()}; }

}  // namespace

DiscreteSignedMeasure empirical_measure(const Dataset& data) {
    if (data.empty()) throw std::invalid_argument("empirical_measure: dataset is empty");
    std::map<std::vector<double>, std::size_t> counts;
    for (std::size_t i = 0; i < data.size(); ++i) ++counts[key_of(data.point(i))];
    DiscreteSignedMeasure mu;
    mu.dim = data.dim;
    const double unit = 1.0 / static_cast<double>(data.size());
    for (const auto& [p, c] : counts) {
        mu.push(std::span<const double>(p.data(), p.size()), unit * static_cast<double>(c));
    }
    return mu;
}

std::pair<DiscreteSignedMeasure, DiscreteSignedMeasure> on_common_support(
    const DiscreteSignedMeasure& a, const DiscreteSignedMeasure& b) {
    if (a.dim != b.dim) throw std::invalid_argument("on_common_support: dimension mismatch");
    std::map<std::vector<double>, std::pair<double, double>> merged;
    for (std::size_t i = 0; i < a.size(); ++i) merged[key_of(a.point(i))].first += a.weights[i];
    for (std::size_t i = 0; i < b.size(); ++i) merged[key_of(b.point(i))].second += b.weights[i];
    DiscreteSignedMeasure ca, cb;
    ca.dim = cb.dim = a.dim;
    for (const auto& [p, w] : merged) {
        const std::span<const double> pt(p.data(), p.size());
        ca.push(pt, w.first);
        cb.push(pt, w.second);
    }
    return {std::move(ca), std::move(cb)};
}

}  // namespace dpcube
