// dpcube: differentially private synthetic data on the unit hypercube, with
// exact Wasserstein evaluation, small-instance privacy audits, and accuracy
// rate sweeps. See README.md for usage examples.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpcube/audit.hpp"
#include "dpcube/bench.hpp"
#include "dpcube/io.hpp"
#include "dpcube/metrics.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAuditFail = 3;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("DPCUBE_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 0;
}

dpcube::Mechanism parse_mechanism(const std::string& name) {
    if (name == "pmm") return dpcube::Mechanism::Pmm;
    if (name == "psmm") return dpcube::Mechanism::Psmm;
    throw CLI::ValidationError("--mechanism must be pmm or psmm");
}

struct CommonFlags {
    std::string mechanism = "pmm";
    int dim = 1;
    double eps = 0.0;  // unset sentinel: generate/rate/audit demand an explicit budget
    std::vector<std::size_t> n_values;
    int trials = 1;
    std::uint64_t seed = default_seed();
    std::string policy = "uniform";
    int depth = -1;
    int snap_depth = -1;
    bool normalize = false;
    std::string input;
    std::string output;
    std::string format = "json";
    std::string manifest_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--mechanism", flags.mechanism, "Mechanism: pmm or psmm");
    cmd->add_option("--dim", flags.dim, "Data dimension d >= 1");
    cmd->add_option("--eps", flags.eps, "Privacy budget epsilon > 0");
    cmd->add_option("--n", flags.n_values, "Dataset sizes (repeat or comma-separate)")
        ->delimiter(',');
    cmd->add_option("--trials", flags.trials, "Trials per n");
    cmd->add_option("--seed", flags.seed, "Master seed (default: DPCUBE_SEED env or 0)");
    cmd->add_option("--policy", flags.policy, "Consistency policy: uniform or proportional")
        ->check(CLI::IsMember({"uniform", "proportional"}));
    cmd->add_option("--depth", flags.depth, "PMM partition depth override");
    cmd->add_option("--snap-depth", flags.snap_depth, "Evaluation snap depth override (d >= 2)");
    cmd->add_flag("--normalize", flags.normalize, "Min-max scale CSV input columns to [0,1]");
    cmd->add_option("--input", flags.input, "Input CSV of source points");
    cmd->add_option("--output", flags.output, "Output path prefix");
    cmd->add_option("--format", flags.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--manifest", flags.manifest_path,
                    "JSON manifest; explicit flags override its fields");
}

void merge_manifest_file(CLI::App* cmd, CommonFlags& flags) {
    if (flags.manifest_path.empty()) return;
    std::ifstream in(flags.manifest_path);
    if (!in) throw dpcube::DataError("cannot open manifest '" + flags.manifest_path + "'");
    nlohmann::json j;
    in >> j;
    auto absent = [&](const std::string& name) { return cmd->count("--" + name) == 0; };
    if (j.contains("mechanism") && absent("mechanism")) flags.mechanism = j["mechanism"];
    if (j.contains("dim") && absent("dim")) flags.dim = j["dim"];
    if (j.contains("eps") && absent("eps")) flags.eps = j["eps"];
    if (j.contains("seed") && absent("seed")) flags.seed = j["seed"];
    if (j.contains("policy") && absent("policy")) flags.policy = j["policy"];
    if (j.contains("trials") && absent("trials")) flags.trials = j["trials"];
    if (j.contains("snap_depth") && absent("snap-depth")) flags.snap_depth = j["snap_depth"];
    if (j.contains("n") && absent("n")) flags.n_values = j["n"].get<std::vector<std::size_t>>();
    if (j.contains("source_points") && flags.n_values.empty()) {
        flags.n_values = {j["source_points"].get<std::size_t>()};
    }
    // A recorded pmm depth reproduces the run even off the canonical size.
    if (j.contains("depth") && absent("depth")) flags.depth = j["depth"];
}

dpcube::ExperimentManifest to_manifest(const CommonFlags& flags) {
    dpcube::ExperimentManifest m;
    m.mechanism = parse_mechanism(flags.mechanism);
    m.dim = flags.dim;
    m.eps = flags.eps;
    m.n_values = flags.n_values;
    m.trials = flags.trials;
    m.seed = flags.seed;
    m.policy = flags.policy == "proportional" ? dpcube::ConsistencyPolicy::Proportional
                                              : dpcube::ConsistencyPolicy::Uniform;
    if (flags.depth >= 0) m.depth = flags.depth;
    if (flags.snap_depth >= 0) m.snap_depth = flags.snap_depth;
    return m;
}

int cmd_generate(CLI::App* cmd, CommonFlags& flags) {
    merge_manifest_file(cmd, flags);
    if (!(flags.eps > 0.0)) throw CLI::ValidationError("generate needs --eps > 0");
    dpcube::ExperimentManifest manifest = to_manifest(flags);

    std::optional<dpcube::Dataset> source;
    if (!flags.input.empty()) {
        const int want_dim = cmd->count("--dim") ? flags.dim : 0;
        source = dpcube::read_csv_dataset(flags.input, want_dim, flags.normalize);
        manifest.dim = source->dim;
        manifest.n_values = {source->size()};
    } else if (manifest.n_values.empty()) {
        throw CLI::ValidationError("generate needs --n or --input");
    }

    const dpcube::GenerateOutput out =
        dpcube::run_generate(manifest, source ? &*source : nullptr);

    const std::string prefix = flags.output.empty() ? "synthetic" : flags.output;
    dpcube::write_csv_dataset(prefix + ".csv", out.synthetic);
    std::ofstream meta(prefix + ".json");
    meta << out.metadata_json;
    std::cout << "wrote " << out.synthetic.size() << " points to " << prefix << ".csv ("
              << prefix << ".json has the reproduction metadata)\n";
    return kExitOk;
}

int cmd_rate(CLI::App* cmd, CommonFlags& flags) {
    merge_manifest_file(cmd, flags);
    if (!(flags.eps > 0.0)) throw CLI::ValidationError("rate needs --eps > 0");
    const dpcube::ExperimentManifest manifest = to_manifest(flags);
    {
        std::vector<std::size_t> distinct = manifest.n_values;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 4) throw CLI::ValidationError("rate needs >= 4 distinct --n values");
    }

    const dpcube::RateReport report = dpcube::run_rate(manifest);

    nlohmann::json j;
    j["manifest"] = {
        {"mechanism", flags.mechanism},
        {"dim", manifest.dim},
        {"eps", manifest.eps},
        {"n", manifest.n_values},
        {"trials", manifest.trials},
        {"seed", manifest.seed},
        {"policy", flags.policy},
    };
    if (manifest.snap_depth) j["manifest"]["snap_depth"] = *manifest.snap_depth;
    for (const auto& p : report.points) {
        j["points"].push_back({{"n", p.n},
                               {"trials_ok", p.trials_ok},
                               {"failures", p.failures},
                               {"mean_w1", p.mean_w1},
                               {"stderr_w1", p.stderr_w1},
                               {"theory_bound", p.mean_theory_bound},
                               {"snap_bound", p.snap_bound}});
    }
    j["slope"] = report.slope;
    j["slope_stderr"] = report.slope_stderr;
    j["slope_ci95"] = {report.slope_ci_lo, report.slope_ci_hi};
    j["slope_debiased"] = report.slope_debiased;

    const std::string prefix = flags.output.empty() ? "rate" : flags.output;
    std::ofstream json_out(prefix + ".json");
    json_out << j.dump(2) << "\n";
    std::ostringstream table;
    table << "n,trials_ok,failures,mean_w1,stderr_w1,theory_bound,snap_bound\n";
    char buf[160];
    for (const auto& p : report.points) {
        std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%.17g,%.17g,%.17g,%.17g\n", p.n, p.trials_ok,
                      p.failures, p.mean_w1, p.stderr_w1, p.mean_theory_bound, p.snap_bound);
        table << buf;
    }
    std::ofstream csv_out(prefix + ".csv");
    csv_out << table.str();
    if (flags.format == "csv") {
        std::cout << table.str();
    } else {
        std::cout << j.dump(2) << "\n";
    }
    std::cerr << "slope " << report.slope << " (debiased " << report.slope_debiased
              << "), reports in " << prefix << ".json / " << prefix << ".csv\n";
    return kExitOk;
}

int cmd_audit(CommonFlags& flags, double window, int audit_depth, int cells, int max_points) {
    if (!(flags.eps > 0.0)) throw CLI::ValidationError("audit needs --eps > 0 (finite noise)");
    dpcube::AuditReport report;
    if (parse_mechanism(flags.mechanism) == dpcube::Mechanism::Pmm) {
        if (audit_depth > 2 || max_points > 3) {
            throw CLI::ValidationError(
                "pmm audit enumerates exactly: --audit-depth <= 2, --max-points <= 3");
        }
        report = dpcube::audit_pmm(flags.eps, audit_depth, 3, max_points, window);
    } else {
        if (cells > 3 || max_points > 2) {
            throw CLI::ValidationError("psmm audit enumerates exactly: --cells <= 3, --max-points <= 2");
        }
        report = dpcube::audit_psmm(flags.eps, cells, max_points, window);
    }

    nlohmann::json j;
    j["mechanism"] = flags.mechanism;
    j["eps"] = report.claimed_eps;
    j["max_log_ratio"] = report.max_log_ratio;
    j["adjacent_pairs"] = report.adjacent_pairs;
    j["outcomes_scanned"] = report.outcomes_scanned;
    j["window_coverage"] = report.min_window_coverage;
    j["pass"] = report.pass;
    if (!flags.output.empty()) {
        std::ofstream out(flags.output + ".json");
        out << j.dump(2) << "\n";
    }
    std::cout << j.dump(2) << "\n";
    std::cout << (report.pass ? "PASS" : "FAIL") << ": max log-ratio " << report.max_log_ratio
              << " vs eps " << report.claimed_eps << "\n";
    return report.pass ? kExitOk : kExitAuditFail;
}

int cmd_eval(CLI::App* cmd, CommonFlags& flags, const std::string& file_a,
             const std::string& file_b, const std::string& method) {
    const int want_dim = cmd->count("--dim") ? flags.dim : 0;
    const dpcube::Dataset a = dpcube::read_csv_dataset(file_a, want_dim, flags.normalize);
    const dpcube::Dataset b = dpcube::read_csv_dataset(file_b, a.dim, flags.normalize);
    if (a.dim != b.dim) throw dpcube::DataError("eval: datasets have different dimensions");

    if (method == "snapped") {
        const int snap = flags.snap_depth >= 0 ? flags.snap_depth : 16;
        const dpcube::SnappedW1 out = dpcube::w1_grid_snapped(a, b, snap);
        std::cout << out.value << " (error bound " << out.error_bound << ")\n";
        return kExitOk;
    }
    double value = 0.0;
    if (method == "1d") {
        value = dpcube::w1_1d(dpcube::empirical_measure(a), dpcube::empirical_measure(b));
    } else if (method == "lp") {
        value = dpcube::w1_lp(dpcube::empirical_measure(a), dpcube::empirical_measure(b));
    } else {
        throw CLI::ValidationError("--method must be 1d, lp, or snapped");
    }
    std::cout << value << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dpcube: epsilon-DP synthetic data on [0,1]^d with Wasserstein evaluation"};
    app.require_subcommand(1);

    CommonFlags flags;
    double window = 40.0;
    int audit_depth = 2;
    int cells = 3;
    int max_points = 3;
    std::string file_a, file_b, method = "lp";

    CLI::App* generate = app.add_subcommand("generate", "Run a mechanism once, write CSV + metadata");
    add_common_flags(generate, flags);

    CLI::App* rate = app.add_subcommand("rate", "Accuracy sweep over n with a rate fit");
    add_common_flags(rate, flags);

    CLI::App* audit = app.add_subcommand("audit", "Exhaustive small-instance privacy audit");
    add_common_flags(audit, flags);
    audit->add_option("--window", window, "Per-level scan half-width in sigma units");
    audit->add_option("--audit-depth", audit_depth, "PMM partition depth (<= 2)");
    audit->add_option("--cells", cells, "PSMM grid cells (<= 3)");
    audit->add_option("--max-points", max_points, "Largest audited dataset size");

    CLI::App* eval = app.add_subcommand("eval", "W1 between two CSV datasets");
    add_common_flags(eval, flags);
    eval->add_option("file_a", file_a, "First dataset")->required();
    eval->add_option("file_b", file_b, "Second dataset")->required();
    eval->add_option("--method", method, "1d, lp, or snapped");

    try {
        app.parse(argc, argv);
        if (generate->parsed()) return cmd_generate(generate, flags);
        if (rate->parsed()) return cmd_rate(rate, flags);
        if (audit->parsed()) {
            if (audit->count("--max-points") == 0 && flags.mechanism == "psmm") max_points = 2;
            return cmd_audit(flags, window, audit_depth, cells, max_points);
        }
        if (eval->parsed()) return cmd_eval(eval, flags, file_a, file_b, method);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const dpcube::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
