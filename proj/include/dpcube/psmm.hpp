#pragma once

#include <cstdint>
#include <vector>

#include "dpcube/dataset.hpp"
#include "dpcube/measure.hpp"
#include "dpcube/rng.hpp"

namespace dpcube {

// Uniform k^d grid over [0,1]^d with anchors at the cell centers. Built from
// a target cell count m by rounding k up, so every cell has l-infinity
// diameter 1/k and locate stays O(1).
class CellGrid {
public:
    CellGrid(int dim, std::int64_t target_cells);

    int dim() const { return dim_; }
    int per_axis() const { return per_axis_; }
    std::int64_t cell_count() const { return cell_count_; }

    std::vector<double> anchor(std::int64_t cell) const;
    std::int64_t locate(std::span<const double> x) const;

    // Signed measure with one atom per anchor.
    DiscreteSignedMeasure measure_from_weights(std::vector<double> weights) const;

private:
    int dim_;
    int per_axis_;
    std::int64_t cell_count_;
};

// True cell counts perturbed by i.i.d. Lap_Z(1/eps): weight (n_i+lambda_i)/n
// at every anchor. Weights may be negative and need not sum to 1.
DiscreteSignedMeasure perturb_counts(const Dataset& data, const CellGrid& grid, double eps,
                                     RngStream& rng);

// Closest probability measure to nu in d_BL over the grid anchors.
// mass_denominator, when nonzero, certifies that every weight is an integer
// multiple of 1/mass_denominator (true for perturb_counts output with
// denominator n); large grids then solve an exact integer flow instead of
// the pairwise LP. With denominator 0 large inputs are scaled at 1e7.
DiscreteSignedMeasure project_to_probability(const DiscreteSignedMeasure& nu, const CellGrid& grid,
                                             std::int64_t mass_denominator = 0);

// The two interchangeable projection routes, exposed for cross-testing.
DiscreteSignedMeasure project_with_lp(const DiscreteSignedMeasure& nu, const CellGrid& grid);
DiscreteSignedMeasure project_with_flow(const DiscreteSignedMeasure& nu, const CellGrid& grid,
                                        std::int64_t mass_denominator);

// Largest-remainder apportionment of q units over the support of a
// probability measure; emits count_i copies of each anchor. Every count_i/q
// is within 1/q of the target weight and the counts sum to q exactly.
Dataset rationalize(const DiscreteSignedMeasure& tau, std::int64_t q);

struct PsmmResult {
    Dataset synthetic;
    std::int64_t cells = 0;  // m = k^d
    int per_axis = 0;        // k
    std::int64_t q = 0;      // rationalization denominator
    DiscreteSignedMeasure perturbed;
    DiscreteSignedMeasure projected;
};

// Algorithm: grid with target m = ceil(eps*n) cells, perturb, project,
// rationalize with q = max(10m, 10^4).
PsmmResult run_psmm(const Dataset& data, double eps, RngStream& rng);

}  // namespace dpcube
