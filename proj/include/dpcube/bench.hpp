#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpcube/dataset.hpp"
#include "dpcube/pmm.hpp"
#include "dpcube/psmm.hpp"
#include "dpcube/rng.hpp"

namespace dpcube {

enum class Mechanism { Pmm, Psmm };

struct ExperimentManifest {
    Mechanism mechanism = Mechanism::Pmm;
    int dim = 1;
    double eps = 1.0;
    std::vector<std::size_t> n_values;
    int trials = 1;
    std::uint64_t seed = 0;
    ConsistencyPolicy policy = ConsistencyPolicy::Uniform;
    std::optional<int> depth;       // pmm depth override
    std::optional<int> snap_depth;  // evaluation grid override (d >= 2)

    void validate() const;
};

Dataset uniform_dataset(std::size_t n, int dim, RngStream& rng);

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

// Ordinary least squares of y on x.
OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

struct RatePoint {
    std::size_t n = 0;
    int trials_ok = 0;
    int failures = 0;             // EmptySynthetic trials, recorded not hidden
    double mean_w1 = 0.0;
    double stderr_w1 = 0.0;
    double mean_theory_bound = 0.0;  // pmm: per-run accuracy bound, averaged
    double snap_bound = 0.0;         // snapping error bound (0 when exact)
};

struct RateReport {
    std::vector<RatePoint> points;
    double slope = 0.0;           // OLS on (log2(eps*n), log2(mean W1))
    double slope_stderr = 0.0;
    double slope_ci_lo = 0.0;
    double slope_ci_hi = 0.0;
    double slope_debiased = 0.0;  // same fit after subtracting the snap bound
};

// Accuracy sweep: `trials` mechanism runs per n on seed-derived uniform
// sources, exact W1 in d=1 and grid-snapped W1 in d>=2. Trials run
// concurrently on independent streams; assembly is by trial index. Aborts
// if more than 20% of the trials of any n fail.
RateReport run_rate(const ExperimentManifest& manifest);

// Default evaluation snap depth: mechanism depth + 4. For psmm the
// mechanism depth is ceil(log2(cell count)).
int default_snap_depth(const ExperimentManifest& manifest, std::size_t n);

struct GenerateOutput {
    Dataset synthetic;
    std::string metadata_json;  // every parameter needed to reproduce the run
};

// One mechanism run on the given source data (or a seed-derived uniform
// source of size n when source is null).
GenerateOutput run_generate(const ExperimentManifest& manifest, const Dataset* source);

}  // namespace dpcube
