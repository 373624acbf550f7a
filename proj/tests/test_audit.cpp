#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dpcube/audit.hpp"

using namespace dpcube;

TEST_CASE("pmm audit certifies the optimal schedule budget") {
    const AuditReport report = audit_pmm(1.0, 2, 3, 3, 40.0);
    CHECK(report.pass);
    CHECK(report.max_log_ratio <= 1.0 + 1e-9);
    // The bound is tight: some adjacent pair attains the full budget.
    CHECK(report.max_log_ratio >= 1.0 - 1e-6);
    CHECK(report.adjacent_pairs > 0);
    CHECK(report.min_window_coverage >= 1.0 - 1e-6);
}

TEST_CASE("pmm audit at other budgets") {
    for (double eps : {0.5, 2.0}) {
        const AuditReport report = audit_pmm(eps, 2, 3, 3, 40.0);
        CHECK(report.pass);
        CHECK(report.max_log_ratio == doctest::Approx(eps).epsilon(1e-9));
    }
}

TEST_CASE("psmm audit certifies eps") {
    const AuditReport report = audit_psmm(1.0, 3, 2, 40.0);
    CHECK(report.pass);
    CHECK(report.max_log_ratio <= 1.0 + 1e-9);
    CHECK(report.max_log_ratio >= 1.0 - 1e-6);
}

TEST_CASE("broken schedule fails the audit") {
    const BinaryPartition partition(1, 2);
    NoiseSchedule schedule = schedule_for(partition, 1.0);
    schedule.sigmas[1] /= 2.0;  // budget becomes 4/3 while claiming 1
    const AuditReport report = audit_pmm_schedule(schedule, 1.0, 2, 3, 3, 40.0);
    CHECK_FALSE(report.pass);
    CHECK(report.max_log_ratio == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("window coverage guard") {
    CHECK_THROWS_AS(audit_pmm(1.0, 2, 3, 3, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(audit_psmm(1.0, 3, 2, 3.0), std::invalid_argument);
}

TEST_CASE("degenerate budgets are usage errors") {
    CHECK_THROWS_AS(audit_pmm(0.0, 2, 3, 3, 40.0), std::invalid_argument);
    CHECK_THROWS_AS(audit_psmm(-1.0, 3, 2, 40.0), std::invalid_argument);
}
