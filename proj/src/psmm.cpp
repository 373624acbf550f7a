#include "dpcube/psmm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dpcube/dlaplace.hpp"
#include "dpcube/flow.hpp"
#include "dpcube/lp.hpp"

namespace dpcube {

namespace {

constexpr std::int64_t kCellCountGuard = std::int64_t{1} << 26;
// The pairwise projection LP has 2m^2 + 2m variables; beyond this the
// equivalent integer flow takes over.
constexpr std::int64_t kLpRouteMaxCells = 256;

}  // namespace

CellGrid::CellGrid(int dim, std::int64_t target_cells) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("CellGrid: dim must be >= 1");
    if (target_cells < 1) throw std::invalid_argument("CellGrid: target cell count must be >= 1");
    int k = std::max<int>(1, static_cast<int>(std::floor(
                                 std::pow(static_cast<double>(target_cells), 1.0 / dim))));
    auto pow_d = [this](std::int64_t base) {
        std::int64_t v = 1;
        for (int i = 0; i < dim_; ++i) {
            if (base != 0 && v > kCellCountGuard / base) return kCellCountGuard + 1;
            v *= base;
        }
        return v;
    };
    while (pow_d(k) < target_cells) ++k;
    per_axis_ = k;
    cell_count_ = pow_d(k);
    if (cell_count_ > kCellCountGuard) {
        throw std::invalid_argument("CellGrid: cell count exceeds the 2^26 memory guard");
    }
}

std::vector<double> CellGrid::anchor(std::int64_t cell) const {
    std::vector<double> p(dim_);
    for (int axis = dim_ - 1; axis >= 0; --axis) {
        p[axis] = (static_cast<double>(cell % per_axis_) + 0.5) / static_cast<double>(per_axis_);
        cell /= per_axis_;
    }
    return p;
}

std::int64_t CellGrid::locate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("CellGrid: dimension mismatch");
    std::int64_t linear = 0;
    for (int axis = 0; axis < dim_; ++axis) {
        if (!(x[axis] >= 0.0 && x[axis] <= 1.0)) {
            throw std::invalid_argument("CellGrid: coordinate outside [0,1]");
        }
        auto cell = static_cast<std::int64_t>(x[axis] * per_axis_);
        cell = std::min<std::int64_t>(cell, per_axis_ - 1);
        linear = linear * per_axis_ + cell;
    }
    return linear;
}

DiscreteSignedMeasure CellGrid::measure_from_weights(std::vector<double> weights) const {
    if (static_cast<std::int64_t>(weights.size()) != cell_count_) {
        throw std::invalid_argument("CellGrid: weight vector size mismatch");
    }
    DiscreteSignedMeasure m;
    m.dim = dim_;
    m.support.reserve(weights.size() * dim_);
    for (std::int64_t i = 0; i < cell_count_; ++i) {
        const auto p = anchor(i);
        m.support.insert(m.support.end(), p.begin(), p.end());
    }
    m.weights = std::move(weights);
    return m;
}

DiscreteSignedMeasure perturb_counts(const Dataset& data, const CellGrid& grid, double eps,
                                     RngStream& rng) {
    if (data.empty()) throw std::invalid_argument("perturb_counts: dataset is empty");
    if (!(eps > 0.0)) throw std::invalid_argument("perturb_counts: eps must be positive");
    std::vector<std::int64_t> counts(grid.cell_count(), 0);
    for (std::size_t i = 0; i < data.size(); ++i) ++counts[grid.locate(data.point(i))];

    const DiscreteLaplace noise(1.0 / eps);
    const auto n = static_cast<double>(data.size());
    std::vector<double> weights(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        weights[i] = static_cast<double>(counts[i] + noise.sample(rng)) / n;
    }
    return grid.measure_from_weights(std::move(weights));
}

DiscreteSignedMeasure project_with_lp(const DiscreteSignedMeasure& nu, const CellGrid& grid) {
    const auto m = static_cast<int>(nu.size());
    if (static_cast<std::int64_t>(m) != grid.cell_count()) {
        throw std::invalid_argument("project_with_lp: measure not on the grid anchors");
    }

    // Variables u_ij, u'_ij (i != j), v_i, tau_i; constraint rows
    // sum_j (u_ij - u'_ij) + v_i + tau_i >= nu_i and sum tau = 1. The dual
    // of maximizing sum (nu_i - tau_i) f_i over the Lipschitz ball, with tau
    // freed: the u/u' block moves surplus between anchors, v_i disposes of it.
    const int pairs = m * (m - 1);
    LinearProgram lp;
    lp.num_vars = 2 * pairs + 2 * m;
    lp.objective.assign(lp.num_vars, 0.0);
    const int u_base = 0, up_base = pairs, v_base = 2 * pairs, tau_base = 2 * pairs + m;

    for (int i = 0; i < m; ++i) lp.add_row(Relation::GreaterEq, nu.weights[i]);
    const int simplex_row = lp.add_row(Relation::Equal, 1.0);

    int pair_id = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            const double dist = linf_distance(nu.point(i), nu.point(j));
            lp.objective[u_base + pair_id] = dist;
            lp.objective[up_base + pair_id] = dist;
            lp.set(i, u_base + pair_id, 1.0);
            lp.set(i, up_base + pair_id, -1.0);
            lp.set(j, u_base + pair_id, -1.0);
            lp.set(j, up_base + pair_id, 1.0);
            ++pair_id;
        }
    }
    for (int i = 0; i < m; ++i) {
        lp.objective[v_base + i] = 2.0;
        lp.set(i, v_base + i, 1.0);
        lp.set(i, tau_base + i, 1.0);
        lp.set(simplex_row, tau_base + i, 1.0);
    }

    const LpSolution sol = lp_solve(lp);
    if (sol.status != LpStatus::Optimal) {
        throw std::runtime_error("project_with_lp: projection LP did not reach optimality");
    }
    std::vector<double> tau(m);
    for (int i = 0; i < m; ++i) tau[i] = std::max(0.0, sol.x[tau_base + i]);
    return grid.measure_from_weights(std::move(tau));
}

DiscreteSignedMeasure project_with_flow(const DiscreteSignedMeasure& nu, const CellGrid& grid,
                                        std::int64_t mass_denominator) {
    const std::int64_t m = grid.cell_count();
    if (static_cast<std::int64_t>(nu.size()) != m) {
        throw std::invalid_argument("project_with_flow: measure not on the grid anchors");
    }
    if (mass_denominator < 1) throw std::invalid_argument("project_with_flow: bad denominator");

    const int k = grid.per_axis();
    const int disposal = static_cast<int>(m);
    const int tau_sink = static_cast<int>(m) + 1;
    MinCostFlow mcf(static_cast<int>(m) + 2);

    // Transport block: king moves at unit cost stand in for the pairwise
    // u/u' variables (one step = l-infinity distance 1/k; costs scaled by k).
    std::vector<int> dims(grid.dim(), k);
    add_grid_king_arcs(mcf, dims, 1);

    std::vector<int> tau_arcs(m);
    std::int64_t scaled_total = 0;
    for (std::int64_t i = 0; i < m; ++i) {
        const double scaled = nu.weights[i] * static_cast<double>(mass_denominator);
        const auto units = static_cast<std::int64_t>(std::llround(scaled));
        mcf.set_supply(static_cast<int>(i), units);
        scaled_total += units;
        mcf.add_arc(static_cast<int>(i), disposal, 2 * static_cast<std::int64_t>(k));  // v_i
        mcf.add_arc(disposal, static_cast<int>(i), 0);                                 // free fill
        tau_arcs[i] = mcf.add_arc(static_cast<int>(i), tau_sink, 0);                   // tau_i
    }
    mcf.set_supply(tau_sink, -mass_denominator);
    mcf.set_supply(disposal, mass_denominator - scaled_total);

    mcf.solve();
    std::vector<double> tau(m);
    for (std::int64_t i = 0; i < m; ++i) {
        tau[i] = static_cast<double>(mcf.flow(tau_arcs[i])) / static_cast<double>(mass_denominator);
    }
    return grid.measure_from_weights(std::move(tau));
}

DiscreteSignedMeasure project_to_probability(const DiscreteSignedMeasure& nu, const CellGrid& grid,
                                             std::int64_t mass_denominator) {
    if (grid.cell_count() <= kLpRouteMaxCells) return project_with_lp(nu, grid);
    if (mass_denominator >= 1) return project_with_flow(nu, grid, mass_denominator);
    return project_with_flow(nu, grid, 10'000'000);
}

Dataset rationalize(const DiscreteSignedMeasure& tau, std::int64_t q) {
    if (q == 0) throw std::invalid_argument("rationalize: q must be nonzero");
    if (q < 0) throw std::invalid_argument("rationalize: q must be positive");
    if (!tau.is_probability(1e-7)) {
        throw std::invalid_argument("rationalize: input is not a probability measure");
    }

    const std::size_t m = tau.size();
    std::vector<std::int64_t> counts(m);
    std::vector<std::pair<double, std::size_t>> remainders(m);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double target = std::max(0.0, tau.weights[i]) * static_cast<double>(q);
        counts[i] = static_cast<std::int64_t>(std::floor(target));
        remainders[i] = {target - std::floor(target), i};
        assigned += counts[i];
    }
    // Hand the leftover units to the largest remainders; ties to lower index.
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::int64_t leftover = q - assigned;
    for (std::size_t i = 0; leftover > 0 && i < m; ++i, --leftover) ++counts[remainders[i].second];
    // Floating slack can leave one unit unassigned past the remainder pass.
    for (std::size_t i = 0; leftover > 0; i = (i + 1) % m, --leftover) ++counts[i];

    Dataset out(tau.dim);
    for (std::size_t i = 0; i < m; ++i) {
        const auto p = tau.point(i);
        for (std::int64_t c = 0; c < counts[i]; ++c) out.push(p);
    }
    return out;
}

PsmmResult run_psmm(const Dataset& data, double eps, RngStream& rng) {
    if (data.empty()) throw std::invalid_argument("run_psmm: dataset is empty");
    if (!(eps > 0.0)) throw std::invalid_argument("run_psmm: eps must be positive");

    const auto target_m = static_cast<std::int64_t>(
        std::ceil(eps * static_cast<double>(data.size())));
    const CellGrid grid(data.dim, std::max<std::int64_t>(1, target_m));

    PsmmResult result;
    result.cells = grid.cell_count();
    result.per_axis = grid.per_axis();
    result.q = std::max<std::int64_t>(10 * grid.cell_count(), 10'000);
    result.perturbed = perturb_counts(data, grid, eps, rng);
    result.projected = project_to_probability(result.perturbed, grid,
                                              static_cast<std::int64_t>(data.size()));
    result.synthetic = rationalize(result.projected, result.q);
    return result;
}

}  // namespace dpcube
