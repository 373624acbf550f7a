#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dpcube/counts.hpp"
#include "dpcube/dataset.hpp"
#include "dpcube/partition.hpp"
#include "dpcube/rng.hpp"

namespace dpcube {

// Per-level noise magnitudes sigma_0 .. sigma_r. The privacy budget consumed
// by noising all levels is sum_j 1/sigma_j.
struct NoiseSchedule {
    std::vector<double> sigmas;

    double budget() const {
        double eps = 0.0;
        for (double s : sigmas) eps += 1.0 / s;
        return eps;
    }
};

// Budget-optimal magnitudes sigma_j = S / (eps * sqrt(Delta_{j-1})) with
// S = sum_j sqrt(Delta_{j-1}). `deltas` is the list Delta_{-1} .. Delta_{r-1}
// (one entry per level of the schedule).
NoiseSchedule optimal_schedule(std::span<const double> deltas, double eps);

// Convenience: optimal schedule for a partition's own Delta sequence.
NoiseSchedule schedule_for(const BinaryPartition& partition, double eps);

// Canonical depth for the hypercube: r = round(log2(eps*n)) - 1 for d = 1,
// r = round(log2(eps*n)) for d >= 2, floored at 0. Rejects eps*n <= 1.
int choose_depth(double eps, std::size_t n, int dim);

struct NoisyCounts {
    CountTree counts;                                // clamped at zero
    std::vector<std::vector<std::int64_t>> lambda;   // pre-clamp noise, per node
};

// Independent Lap_Z(sigma_j) noise per node of level j, clamped at zero.
// Draw order is breadth-first by node index, so a fixed stream reproduces
// the exact same tree.
NoisyCounts add_noise(const CountTree& true_tree, const NoiseSchedule& schedule, RngStream& rng);

// 0 when a, b in Z_+^2 are comparable in the product order, else
// min(|a0-b0|, |a1-b1|): the l-infinity distance from a to the set of
// points comparable to b. Rejects negative inputs.
std::int64_t flux(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1);

enum class ConsistencyPolicy { Uniform, Proportional };

// Top-down repair of a noisy tree: each child pair is replaced by a pair on
// the line x + y = m_theta that is comparable (product order) to the noisy
// pair. Uniform picks the Euclidean-closest such lattice point (ties toward
// the larger first coordinate); Proportional picks the point nearest the ray
// through the origin and the input, repaired into the comparable range.
CountTree enforce_consistency(const CountTree& noisy, ConsistencyPolicy policy);

// Single child-pair transform, exposed for the fuzz suites.
std::pair<std::int64_t, std::int64_t> transform_pair(std::int64_t target, std::int64_t child0,
                                                     std::int64_t child1, ConsistencyPolicy policy);

// Raised when the consistent root count comes out zero, which can happen
// when the root noise drives n' to 0; callers decide how to treat the trial.
class EmptySyntheticError : public std::runtime_error {
public:
    EmptySyntheticError() : std::runtime_error("synthetic output is empty (consistent root count is 0)") {}
};

struct PmmOptions {
    ConsistencyPolicy policy = ConsistencyPolicy::Uniform;
    std::optional<int> depth;                 // overrides choose_depth
    std::optional<NoiseSchedule> schedule;    // overrides optimal_schedule
};

struct PmmResult {
    Dataset synthetic;
    int depth = 0;
    NoiseSchedule schedule;
    CountTree true_tree;
    CountTree noisy_tree;
    CountTree consistent_tree;
    std::vector<std::vector<std::int64_t>> lambda;
};

// The full mechanism: true counts, noise, consistency, then m_theta copies
// of each leaf's center. Output size equals the consistent root count.
PmmResult run_pmm(const Dataset& data, double eps, const PmmOptions& options, RngStream& rng);

}  // namespace dpcube
