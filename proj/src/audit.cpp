#include "dpcube/audit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpcube/dlaplace.hpp"
#include "dpcube/psmm.hpp"

namespace dpcube {

namespace {

constexpr double kCoverageFloor = 1.0 - 1e-6;
constexpr double kSlack = 1e-9;

// All multisets of `size` points over `num_anchors` anchors, as count vectors.
void enumerate_multisets(int num_anchors, int size, std::vector<int>& counts, int from,
                         std::vector<std::vector<int>>& out) {
    if (size == 0) {
        out.push_back(counts);
        return;
    }
    for (int a = from; a < num_anchors; ++a) {
        ++counts[a];
        enumerate_multisets(num_anchors, size - 1, counts, a, out);
        --counts[a];
    }
}

std::vector<std::vector<int>> all_bases(int num_anchors, int max_points) {
    std::vector<std::vector<int>> bases;
    std::vector<int> counts(num_anchors, 0);
    for (int size = 0; size < max_points; ++size) {
        enumerate_multisets(num_anchors, size, counts, 0, bases);
    }
    return bases;
}

// Largest log pmf ratio for one count pair over the scanned window, both
// ratio directions.
double scan_count(const DiscreteLaplace& noise, std::int64_t n, std::int64_t n_adj,
                  std::int64_t half_width, long& outcomes) {
    const std::int64_t lo = std::min(n, n_adj) - half_width;
    const std::int64_t hi = std::max(n, n_adj) + half_width;
    double best = 0.0;
    for (std::int64_t z = lo; z <= hi; ++z) {
        const double diff = noise.log_pmf(z - n) - noise.log_pmf(z - n_adj);
        best = std::max(best, std::abs(diff));
        ++outcomes;
    }
    return best;
}

double window_coverage(const DiscreteLaplace& noise, std::int64_t half_width) {
    return noise.cdf(half_width) - noise.cdf(-half_width - 1);
}

}  // namespace

AuditReport audit_pmm_schedule(const NoiseSchedule& schedule, double claimed_eps, int depth,
                               int num_anchors, int max_points, double window_sigmas) {
    if (!(claimed_eps > 0.0)) throw std::invalid_argument("audit: eps must be positive");
    if (num_anchors < 1 || max_points < 1) throw std::invalid_argument("audit: bad instance size");
    if (static_cast<int>(schedule.sigmas.size()) != depth + 1) {
        throw std::invalid_argument("audit: schedule length must be depth+1");
    }

    const BinaryPartition partition(1, depth);
    std::vector<DiscreteLaplace> noise;
    std::vector<std::int64_t> half_width;
    AuditReport report;
    report.claimed_eps = claimed_eps;
    report.min_window_coverage = 1.0;
    for (double sigma : schedule.sigmas) {
        noise.emplace_back(sigma);
        half_width.push_back(static_cast<std::int64_t>(std::ceil(window_sigmas * sigma)));
        const double coverage = window_coverage(noise.back(), half_width.back());
        report.min_window_coverage = std::min(report.min_window_coverage, coverage);
    }
    if (report.min_window_coverage < kCoverageFloor) {
        throw std::invalid_argument(
            "audit: window covers less than 1-1e-6 of the noise mass; enlarge the window");
    }

    // Anchors: centers of a uniform num_anchors grid on [0,1].
    std::vector<double> anchors(num_anchors);
    for (int a = 0; a < num_anchors; ++a) {
        anchors[a] = (static_cast<double>(a) + 0.5) / num_anchors;
    }

    auto tree_of = [&](const std::vector<int>& counts) {
        Dataset data(1);
        for (int a = 0; a < num_anchors; ++a) {
            for (int c = 0; c < counts[a]; ++c) data.push({anchors[a]});
        }
        return data.empty() ? CountTree::zeros(depth, CountKind::True)
                            : true_counts(data, partition);
    };

    for (const auto& base : all_bases(num_anchors, max_points)) {
        const CountTree tree = tree_of(base);
        for (int added = 0; added < num_anchors; ++added) {
            std::vector<int> grown = base;
            ++grown[added];
            const CountTree tree_adj = tree_of(grown);
            ++report.adjacent_pairs;
            double log_ratio = 0.0;
            for (int j = 0; j <= depth; ++j) {
                for (std::size_t i = 0; i < tree.levels[j].size(); ++i) {
                    log_ratio += scan_count(noise[j], tree.levels[j][i], tree_adj.levels[j][i],
                                            half_width[j], report.outcomes_scanned);
                }
            }
            report.max_log_ratio = std::max(report.max_log_ratio, log_ratio);
        }
    }
    report.pass = report.max_log_ratio <= claimed_eps + kSlack;
    return report;
}

AuditReport audit_pmm(double eps, int depth, int num_anchors, int max_points,
                      double window_sigmas) {
    if (!(eps > 0.0)) throw std::invalid_argument("audit: eps must be positive");
    const BinaryPartition partition(1, depth);
    return audit_pmm_schedule(schedule_for(partition, eps), eps, depth, num_anchors, max_points,
                              window_sigmas);
}

AuditReport audit_psmm(double eps, int cells, int max_points, double window_sigmas) {
    if (!(eps > 0.0)) throw std::invalid_argument("audit: eps must be positive");
    if (cells < 1 || max_points < 1) throw std::invalid_argument("audit: bad instance size");

    const CellGrid grid(1, cells);
    const DiscreteLaplace noise(1.0 / eps);
    const auto half_width =
        static_cast<std::int64_t>(std::ceil(window_sigmas * noise.sigma()));

    AuditReport report;
    report.claimed_eps = eps;
    report.min_window_coverage = window_coverage(noise, half_width);
    if (report.min_window_coverage < kCoverageFloor) {
        throw std::invalid_argument(
            "audit: window covers less than 1-1e-6 of the noise mass; enlarge the window");
    }

    const auto m = static_cast<int>(grid.cell_count());
    for (const auto& base : all_bases(m, max_points)) {
        for (int added = 0; added < m; ++added) {
            std::vector<int> grown = base;
            ++grown[added];
            ++report.adjacent_pairs;
            double log_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                log_ratio +=
                    scan_count(noise, base[i], grown[i], half_width, report.outcomes_scanned);
            }
            report.max_log_ratio = std::max(report.max_log_ratio, log_ratio);
        }
    }
    report.pass = report.max_log_ratio <= eps + kSlack;
    return report;
}

}  // namespace dpcube
