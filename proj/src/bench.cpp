#include "dpcube/bench.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dpcube/metrics.hpp"

namespace dpcube {

void ExperimentManifest::validate() const {
    if (dim < 1) throw std::invalid_argument("manifest: dim must be >= 1");
    if (!(eps > 0.0)) throw std::invalid_argument("manifest: eps must be positive");
    if (trials < 1) throw std::invalid_argument("manifest: trials must be >= 1");
    for (std::size_t n : n_values) {
        if (n < 1) throw std::invalid_argument("manifest: all n must be >= 1");
    }
}

Dataset uniform_dataset(std::size_t n, int dim, RngStream& rng) {
    Dataset data(dim);
    data.coords.resize(n * dim);
    for (auto& c : data.coords) c = rng.next_half_open();
    return data;
}

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t k = x.size();
    if (k != y.size() || k < 2) throw std::invalid_argument("ols_fit: need >= 2 paired points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_fit: degenerate x values");
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (k > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += r * r;
        }
        fit.slope_stderr = std::sqrt(rss / static_cast<double>(k - 2) / sxx);
    }
    return fit;
}

int default_snap_depth(const ExperimentManifest& manifest, std::size_t n) {
    if (manifest.snap_depth) return *manifest.snap_depth;
    if (manifest.mechanism == Mechanism::Pmm) {
        const int depth =
            manifest.depth ? *manifest.depth : choose_depth(manifest.eps, n, manifest.dim);
        return depth + 4;
    }
    const auto target = static_cast<std::int64_t>(
        std::ceil(manifest.eps * static_cast<double>(n)));
    const CellGrid grid(manifest.dim, std::max<std::int64_t>(1, target));
    // The psmm analog of the pmm depth: the dyadic rank of the cell count.
    const auto bits =
        static_cast<int>(std::lround(std::log2(static_cast<double>(grid.cell_count()))));
    return bits + 4;
}

namespace {

struct TrialOutcome {
    bool ok = false;
    bool empty_synthetic = false;
    double w1 = 0.0;
    double snap_bound = 0.0;
    double theory_bound = 0.0;
};

double pmm_theory_bound(const PmmResult& result, int dim, std::size_t n) {
    // Expected-accuracy bound evaluated on the schedule actually used:
    // (2*sqrt(2)/n) * sum_j sigma_j * Delta_{j-1} + delta.
    const BinaryPartition partition(dim, result.depth);
    const std::vector<double> deltas = partition.delta_levels();
    double sum = 0.0;
    for (int j = 0; j <= result.depth; ++j) {
        sum += result.schedule.sigmas[j] * deltas[j];
    }
    return 2.0 * std::sqrt(2.0) * sum / static_cast<double>(n) + partition.resolution();
}

TrialOutcome run_trial(const ExperimentManifest& manifest, std::size_t n, std::size_t n_index,
                       int trial) {
    const RngStream master(manifest.seed);
    RngStream source_rng = master.derive(n_index, 2 * static_cast<std::uint64_t>(trial));
    RngStream mech_rng = master.derive(n_index, 2 * static_cast<std::uint64_t>(trial) + 1);
    const Dataset source = uniform_dataset(n, manifest.dim, source_rng);

    TrialOutcome out;
    try {
        Dataset synthetic;
        if (manifest.mechanism == Mechanism::Pmm) {
            PmmOptions options;
            options.policy = manifest.policy;
            options.depth = manifest.depth;
            PmmResult result = run_pmm(source, manifest.eps, options, mech_rng);
            out.theory_bound = pmm_theory_bound(result, manifest.dim, n);
            synthetic = std::move(result.synthetic);
        } else {
            PsmmResult result = run_psmm(source, manifest.eps, mech_rng);
            synthetic = std::move(result.synthetic);
        }
        if (manifest.dim == 1) {
            out.w1 = w1_1d(empirical_measure(source), empirical_measure(synthetic));
        } else {
            const SnappedW1 snapped =
                w1_grid_snapped(source, synthetic, default_snap_depth(manifest, n));
            out.w1 = snapped.value;
            out.snap_bound = snapped.error_bound;
        }
        out.ok = true;
    } catch (const EmptySyntheticError&) {
        out.empty_synthetic = true;
    }
    return out;
}

}  // namespace

RateReport run_rate(const ExperimentManifest& manifest) {
    manifest.validate();
    if (manifest.n_values.size() < 2) {
        throw std::invalid_argument("run_rate: need at least two n values to fit a rate");
    }

    RateReport report;
    std::vector<double> log_n, log_w1, log_w1_debiased;

    for (std::size_t ni = 0; ni < manifest.n_values.size(); ++ni) {
        const std::size_t n = manifest.n_values[ni];
        std::vector<TrialOutcome> outcomes(manifest.trials);
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;

        auto worker = [&]() {
            for (int t = next.fetch_add(1); t < manifest.trials; t = next.fetch_add(1)) {
                try {
                    outcomes[t] = run_trial(manifest, n, ni, t);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        const unsigned extra =
            std::min<unsigned>(hw, static_cast<unsigned>(manifest.trials)) - 1;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < extra; ++w) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);

        RatePoint point;
        point.n = n;
        double sum = 0.0, sum_bound = 0.0, snap_bound = 0.0;
        for (const auto& out : outcomes) {
            if (!out.ok) {
                ++point.failures;
                continue;
            }
            ++point.trials_ok;
            sum += out.w1;
            sum_bound += out.theory_bound;
            snap_bound = std::max(snap_bound, out.snap_bound);
        }
        if (point.failures * 5 > manifest.trials) {
            throw std::runtime_error("run_rate: more than 20% of trials failed at n=" +
                                     std::to_string(n));
        }
        point.mean_w1 = sum / point.trials_ok;
        point.mean_theory_bound = sum_bound / point.trials_ok;
        point.snap_bound = snap_bound;
        double var = 0.0;
        for (const auto& out : outcomes) {
            if (out.ok) var += (out.w1 - point.mean_w1) * (out.w1 - point.mean_w1);
        }
        if (point.trials_ok > 1) {
            point.stderr_w1 = std::sqrt(var / (point.trials_ok - 1) /
                                        static_cast<double>(point.trials_ok));
        }
        report.points.push_back(point);

        log_n.push_back(std::log2(manifest.eps * static_cast<double>(n)));
        log_w1.push_back(std::log2(point.mean_w1));
        // Keep the debiased value positive; the clamp only matters if the
        // snapping bound swallows the whole signal.
        const double debiased = std::max(point.mean_w1 - point.snap_bound, point.mean_w1 * 0.02);
        log_w1_debiased.push_back(std::log2(debiased));
    }

    const OlsFit fit = ols_fit(log_n, log_w1);
    report.slope = fit.slope;
    report.slope_stderr = fit.slope_stderr;
    report.slope_ci_lo = fit.slope - 1.96 * fit.slope_stderr;
    report.slope_ci_hi = fit.slope + 1.96 * fit.slope_stderr;
    report.slope_debiased = ols_fit(log_n, log_w1_debiased).slope;
    return report;
}

GenerateOutput run_generate(const ExperimentManifest& manifest, const Dataset* source) {
    manifest.validate();
    const RngStream master(manifest.seed);
    Dataset local;
    if (source == nullptr) {
        if (manifest.n_values.size() != 1) {
            throw std::invalid_argument("run_generate: need exactly one n for a uniform source");
        }
        RngStream source_rng = master.derive(0, 0);
        local = uniform_dataset(manifest.n_values[0], manifest.dim, source_rng);
        source = &local;
    }
    RngStream mech_rng = master.derive(0, 1);

    nlohmann::json meta;
    meta["mechanism"] = manifest.mechanism == Mechanism::Pmm ? "pmm" : "psmm";
    meta["dim"] = source->dim;
    meta["eps"] = manifest.eps;
    meta["seed"] = manifest.seed;
    meta["source_points"] = source->size();
    meta["source"] = (source == &local) ? "uniform" : "file";

    GenerateOutput out;
    if (manifest.mechanism == Mechanism::Pmm) {
        PmmOptions options;
        options.policy = manifest.policy;
        options.depth = manifest.depth;
        PmmResult result = run_pmm(*source, manifest.eps, options, mech_rng);
        meta["policy"] = manifest.policy == ConsistencyPolicy::Uniform ? "uniform" : "proportional";
        meta["depth"] = result.depth;
        meta["schedule"] = result.schedule.sigmas;
        meta["budget"] = result.schedule.budget();
        out.synthetic = std::move(result.synthetic);
    } else {
        PsmmResult result = run_psmm(*source, manifest.eps, mech_rng);
        meta["cells"] = result.cells;
        meta["per_axis"] = result.per_axis;
        meta["q"] = result.q;
        out.synthetic = std::move(result.synthetic);
    }
    meta["output_points"] = out.synthetic.size();
    out.metadata_json = meta.dump(2) + "\n";
    return out;
}

}  // namespace dpcube
