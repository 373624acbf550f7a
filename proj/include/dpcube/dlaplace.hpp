#pragma once

#include <cstdint>

#include "dpcube/rng.hpp"

namespace dpcube {

// Discrete Laplacian distribution Lap_Z(sigma) on the integers:
//   P(Z = z) = (1-p)/(1+p) * p^|z|,   p = exp(-1/sigma).
// Zero mean, variance 2p/(1-p)^2 (strictly below the continuous 2*sigma^2).
class DiscreteLaplace {
public:
    explicit DiscreteLaplace(double sigma);

    double sigma() const { return sigma_; }
    double p() const { return p_; }

    double pmf(std::int64_t z) const;
    double log_pmf(std::int64_t z) const;
    // P(Z <= z).
    double cdf(std::int64_t z) const;

    double mean() const { return 0.0; }
    double variance() const;

    // Exact draw: difference of two i.i.d. geometric(1-p) variables, which
    // has precisely the Lap_Z pmf. Branch-free in the tails; no truncation.
    std::int64_t sample(RngStream& rng) const;

private:
    double sigma_;
    double p_;        // exp(-1/sigma)
    double log_norm_; // log((1-p)/(1+p))
};

}  // namespace dpcube
