#pragma once

#include "dpcube/dataset.hpp"
#include "dpcube/measure.hpp"

namespace dpcube {

// Exact W1 between probability measures on [0,1]: sorted-support sweep of
// the CDF difference. O(k log k).
double w1_1d(const DiscreteSignedMeasure& mu, const DiscreteSignedMeasure& nu);

// Exact W1 under the l-infinity ground metric via the transport LP over the
// coupling polytope. Guarded to a combined support of 2000 points.
double w1_lp(const DiscreteSignedMeasure& mu, const DiscreteSignedMeasure& nu);

// Bounded-Lipschitz distance between signed measures on a common support:
// the f-value maximization LP with |f_i| <= 1 and |f_i - f_j| <= ||y_i-y_j||.
double d_bl(const DiscreteSignedMeasure& a, const DiscreteSignedMeasure& b);

struct SnappedW1 {
    double value = 0.0;
    double error_bound = 0.0;  // additive: |value - exact W1| <= error_bound
};

// Desk-scale W1 for d >= 2: snaps both empirical measures to the cubic grid
// with per-axis resolution 2^floor(snap_depth/d), then computes the snapped
// distance exactly (transport LP for small supports, integer min-cost flow
// on the grid's king graph otherwise). The bound is 2x the cell diameter.
SnappedW1 w1_grid_snapped(const Dataset& data, const Dataset& synth, int snap_depth);

}  // namespace dpcube
