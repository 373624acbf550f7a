#include "dpcube/pmm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpcube/dlaplace.hpp"

namespace dpcube {

NoiseSchedule optimal_schedule(std::span<const double> deltas, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("optimal_schedule: eps must be positive");
    if (deltas.empty()) throw std::invalid_argument("optimal_schedule: need at least one Delta");
    double s = 0.0;
    for (double delta : deltas) {
        if (!(delta > 0.0)) throw std::invalid_argument("optimal_schedule: Delta values must be positive");
        s += std::sqrt(delta);
    }
    NoiseSchedule schedule;
    schedule.sigmas.reserve(deltas.size());
    for (double delta : deltas) {
        schedule.sigmas.push_back(s / (eps * std::sqrt(delta)));
    }
    return schedule;
}

NoiseSchedule schedule_for(const BinaryPartition& partition, double eps) {
    const std::vector<double> deltas = partition.delta_levels();
    // sigma_j is driven by Delta_{j-1}, so the schedule consumes the first
    // depth+1 entries Delta_{-1} .. Delta_{r-1}.
    return optimal_schedule(std::span<const double>(deltas.data(), partition.depth() + 1), eps);
}

int choose_depth(double eps, std::size_t n, int dim) {
    if (dim < 1) throw std::invalid_argument("choose_depth: dim must be >= 1");
    if (!(eps > 0.0)) throw std::invalid_argument("choose_depth: eps must be positive");
    const double budget_points = eps * static_cast<double>(n);
    if (!(budget_points > 1.0)) {
        throw std::invalid_argument(
            "choose_depth: eps*n <= 1 leaves no usable depth; increase eps or the dataset size");
    }
    const long r = std::lround(std::log2(budget_points)) - (dim == 1 ? 1 : 0);
    return static_cast<int>(std::max(0L, r));
}

NoisyCounts add_noise(const CountTree& true_tree, const NoiseSchedule& schedule, RngStream& rng) {
    if (static_cast<int>(schedule.sigmas.size()) != true_tree.depth + 1) {
        throw std::invalid_argument("add_noise: schedule length must be depth+1");
    }
    NoisyCounts out;
    out.counts = CountTree::zeros(true_tree.depth, CountKind::Noisy);
    out.lambda.resize(static_cast<std::size_t>(true_tree.depth) + 1);
    for (int j = 0; j <= true_tree.depth; ++j) {
        const DiscreteLaplace noise(schedule.sigmas[j]);
        const auto& level = true_tree.levels[j];
        auto& noisy = out.counts.levels[j];
        auto& lambda = out.lambda[j];
        lambda.resize(level.size());
        for (std::size_t i = 0; i < level.size(); ++i) {
            lambda[i] = noise.sample(rng);
            noisy[i] = std::max<std::int64_t>(0, level[i] + lambda[i]);
        }
    }
    return out;
}

std::int64_t flux(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
    if (a0 < 0 || a1 < 0 || b0 < 0 || b1 < 0) {
        throw std::invalid_argument("flux: arguments must be nonnegative");
    }
    const bool a_le_b = a0 <= b0 && a1 <= b1;
    const bool b_le_a = b0 <= a0 && b1 <= a1;
    if (a_le_b || b_le_a) return 0;
    return std::min(std::abs(a0 - b0), std::abs(a1 - b1));
}

namespace {

// Feasible first coordinates x such that (x, m－x) lies in Z_+^2 and is
// comparable to (c0, c1): an interval, nonempty for every m >= 0.
struct FeasibleRange {
    std::int64_t lo;
    std::int64_t hi;
};

FeasibleRange comparable_range(std::int64_t m, std::int64_t c0, std::int64_t c1) {
    if (c0 + c1 >= m) {
        // Surplus: (x, m-x) <= (c0, c1) componentwise.
        return {std::max<std::int64_t>(0, m - c1), std::min(c0, m)};
    }
    // Deficit: (c0, c1) <= (x, m-x) componentwise.
    return {c0, m - c1};
}

std::int64_t clamp_to(std::int64_t x, FeasibleRange range) {
    return std::clamp(x, range.lo, range.hi);
}

}  // namespace

std::pair<std::int64_t, std::int64_t> transform_pair(std::int64_t target, std::int64_t child0,
                                                     std::int64_t child1, ConsistencyPolicy policy) {
    if (target < 0 || child0 < 0 || child1 < 0) {
        throw std::invalid_argument("transform_pair: counts must be nonnegative");
    }
    const FeasibleRange range = comparable_range(target, child0, child1);
    std::int64_t x;
    if (policy == ConsistencyPolicy::Proportional && child0 + child1 > 0) {
        // Nearest lattice point on the line to its intersection with the ray
        // through the origin and the input; clamping repairs comparability.
        const __int128 num = static_cast<__int128>(target) * child0;
        const __int128 den = child0 + child1;
        x = static_cast<std::int64_t>((2 * num + den) / (2 * den));
    } else {
        // Euclidean-closest point on the line; the unconstrained minimizer is
        // x* = (m + c0 - c1) / 2, and an exact tie goes to the larger x.
        const std::int64_t num = target + child0 - child1;
        x = (num % 2 == 0) ? num / 2 : (num + 1) / 2;
    }
    x = clamp_to(x, range);
    return {x, target - x};
}

CountTree enforce_consistency(const CountTree& noisy, ConsistencyPolicy policy) {
    CountTree out = CountTree::zeros(noisy.depth, CountKind::Consistent);
    out.levels[0][0] = noisy.levels[0][0];
    for (int j = 0; j < noisy.depth; ++j) {
        const auto& noisy_children = noisy.levels[j + 1];
        auto& children = out.levels[j + 1];
        for (std::size_t i = 0; i < out.levels[j].size(); ++i) {
            const auto [left, right] = transform_pair(out.levels[j][i], noisy_children[2 * i],
                                                      noisy_children[2 * i + 1], policy);
            children[2 * i] = left;
            children[2 * i + 1] = right;
        }
    }
    return out;
}

PmmResult run_pmm(const Dataset& data, double eps, const PmmOptions& options, RngStream& rng) {
    if (data.empty()) throw std::invalid_argument("run_pmm: dataset is empty");
    if (!(eps > 0.0)) throw std::invalid_argument("run_pmm: eps must be positive");

    const int depth = options.depth ? *options.depth : choose_depth(eps, data.size(), data.dim);
    const BinaryPartition partition(data.dim, depth);

    PmmResult result;
    result.depth = depth;
    result.schedule = options.schedule ? *options.schedule : schedule_for(partition, eps);
    result.true_tree = true_counts(data, partition);

    NoisyCounts noisy = add_noise(result.true_tree, result.schedule, rng);
    result.noisy_tree = std::move(noisy.counts);
    result.lambda = std::move(noisy.lambda);
    result.consistent_tree = enforce_consistency(result.noisy_tree, options.policy);

    if (result.consistent_tree.root() == 0) throw EmptySyntheticError();

    result.synthetic = Dataset(data.dim);
    result.synthetic.coords.reserve(static_cast<std::size_t>(result.consistent_tree.root()) *
                                    data.dim);
    const auto& leaves = result.consistent_tree.levels[depth];
    for (std::uint64_t i = 0; i < leaves.size(); ++i) {
        if (leaves[i] == 0) continue;
        const std::vector<double> center = partition.representative({depth, i});
        for (std::int64_t c = 0; c < leaves[i]; ++c) {
            result.synthetic.push(center);
        }
    }
    return result;
}

}  // namespace dpcube
