#pragma once

#include <cstddef>

#include "dpcube/pmm.hpp"

namespace dpcube {

// Exhaustive small-instance privacy audit: enumerate adjacent dataset pairs
// (differing by adding one anchor point), scan every integer noise outcome
// per count within the window, and report the largest log pmf ratio. The
// mechanism is eps-DP on the audited count vectors iff max <= eps.
struct AuditReport {
    double claimed_eps = 0.0;
    double max_log_ratio = 0.0;
    bool pass = false;
    std::size_t adjacent_pairs = 0;
    long outcomes_scanned = 0;
    double min_window_coverage = 0.0;  // smallest per-count noise mass inside the window
};

// window_sigmas is the per-level half-width in units of sigma_j; each count
// scans z within ceil(window_sigmas * sigma_j) of the true values. Errors if
// the window covers less than 1 - 1e-6 of the noise mass at any level.
AuditReport audit_pmm(double eps, int depth, int num_anchors, int max_points,
                      double window_sigmas);

// Same audit under an arbitrary schedule, judged against claimed_eps;
// lets a deliberately broken schedule show up as FAIL.
AuditReport audit_pmm_schedule(const NoiseSchedule& schedule, double claimed_eps, int depth,
                               int num_anchors, int max_points, double window_sigmas);

// Audit of the signed-measure mechanism's noisy count vector over an
// m-cell grid in one dimension.
AuditReport audit_psmm(double eps, int cells, int max_points, double window_sigmas);

}  // namespace dpcube
