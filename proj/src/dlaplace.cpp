#include "dpcube/dlaplace.hpp"

#include <cmath>
#include <stdexcept>

namespace dpcube {

DiscreteLaplace::DiscreteLaplace(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("DiscreteLaplace: sigma must be positive and finite");
    }
    p_ = std::exp(-1.0 / sigma);
    // log1p keeps the normalizer accurate when p is close to 0 or 1.
    log_norm_ = std::log1p(-p_) - std::log1p(p_);
}

double DiscreteLaplace::pmf(std::int64_t z) const {
    const double a = static_cast<double>(z < 0 ? -z : z) / sigma_;
    if (a > 30.0) {
        // Deep tail: stay in log space to dodge underflow of p^|z|.
        return std::exp(log_norm_ - a);
    }
    return (1.0 - p_) / (1.0 + p_) * std::exp(-a);
}

double DiscreteLaplace::log_pmf(std::int64_t z) const {
    const double a = static_cast<double>(z < 0 ? -z : z) / sigma_;
    return log_norm_ - a;
}

double DiscreteLaplace::cdf(std::int64_t z) const {
    // Geometric tails: P(Z <= z) = p^{-z}/(1+p) for z < 0,
    //                  P(Z <= z) = 1 - p^{z+1}/(1+p) for z >= 0.
    if (z < 0) {
        const double a = static_cast<double>(-z) / sigma_;
        if (a > 30.0) return std::exp(-a - std::log1p(p_));
        return std::exp(-a) / (1.0 + p_);
    }
    const double a = static_cast<double>(z + 1) / sigma_;
    return 1.0 - std::exp(-a) / (1.0 + p_);
}

double DiscreteLaplace::variance() const {
    const double q = 1.0 - p_;
    return 2.0 * p_ / (q * q);
}

std::int64_t DiscreteLaplace::sample(RngStream& rng) const {
    // G = floor(-sigma * ln U) is geometric(1-p) on {0,1,...}:
    // P(G >= k) = P(U <= e^{-k/sigma}) = p^k.
    const double g1 = std::floor(-sigma_ * std::log(rng.next_unit()));
    const double g2 = std::floor(-sigma_ * std::log(rng.next_unit()));
    return static_cast<std::int64_t>(g1) - static_cast<std::int64_t>(g2);
}

}  // namespace dpcube
