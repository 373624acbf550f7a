#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpcube/bench.hpp"
#include "dpcube/io.hpp"

using namespace dpcube;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("bench_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("csv ingestion") {
    const TempFile ok("ok.csv", "0.1,0.2\n0.5,0.5\n0.9,1.0\n");
    const Dataset data = read_csv_dataset(ok.path, 0, false);
    CHECK(data.dim == 2);
    CHECK(data.size() == 3);
    CHECK(data.point(2)[1] == 1.0);

    const TempFile constant("const.csv", "5,0.1\n5,0.9\n");
    const Dataset norm = read_csv_dataset(constant.path, 2, true);
    CHECK(norm.point(0)[0] == 0.5);  // constant column convention
    CHECK(norm.point(1)[0] == 0.5);
    CHECK(norm.point(0)[1] == 0.0);
    CHECK(norm.point(1)[1] == 1.0);
}

TEST_CASE("csv ingestion errors carry locations") {
    const TempFile out_of_range("range.csv", "0.1\n1.5\n");
    try {
        read_csv_dataset(out_of_range.path, 1, false);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("row 2") != std::string::npos);
        CHECK(what.find("column 1") != std::string::npos);
    }

    const TempFile malformed("bad.csv", "0.1,0.2\n0.3,zebra\n");
    try {
        read_csv_dataset(malformed.path, 2, false);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }

    const TempFile empty("empty.csv", "");
    CHECK_THROWS_AS(read_csv_dataset(empty.path, 1, false), DataError);
    CHECK_THROWS_AS(read_csv_dataset("no_such_file.csv", 1, false), DataError);

    const TempFile ragged("ragged.csv", "0.1,0.2\n0.3\n");
    CHECK_THROWS_AS(read_csv_dataset(ragged.path, 2, false), DataError);
}

TEST_CASE("csv round trip preserves doubles") {
    Dataset data(2);
    data.push({0.12345678901234567, 1.0 / 3.0});
    data.push({1e-17, 0.9999999999999999});
    const std::string path = "bench_test_roundtrip.csv";
    write_csv_dataset(path, data);
    const Dataset back = read_csv_dataset(path, 2, false);
    std::remove(path.c_str());
    CHECK(back.coords == data.coords);
}

TEST_CASE("ols fit recovers a line") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(-0.5 * v + 2.0);
    const OlsFit fit = ols_fit(x, y);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.slope_stderr == doctest::Approx(0.0));
}

TEST_CASE("uniform source is deterministic and in range") {
    RngStream a(5), b(5);
    const Dataset da = uniform_dataset(100, 3, a);
    const Dataset db = uniform_dataset(100, 3, b);
    CHECK(da.coords == db.coords);
    for (double c : da.coords) {
        CHECK(c >= 0.0);
        CHECK(c < 1.0);
    }
}

TEST_CASE("default snap depth") {
    ExperimentManifest pmm;
    pmm.mechanism = Mechanism::Pmm;
    pmm.dim = 2;
    pmm.eps = 1.0;
    CHECK(default_snap_depth(pmm, 1024) == 14);  // depth 10 + 4

    ExperimentManifest psmm;
    psmm.mechanism = Mechanism::Psmm;
    psmm.dim = 2;
    psmm.eps = 1.0;
    CHECK(default_snap_depth(psmm, 16) == 8);  // 16 cells -> rank 4 + 4

    psmm.snap_depth = 11;
    CHECK(default_snap_depth(psmm, 16) == 11);
}

TEST_CASE("rate sweep is deterministic and decays") {
    ExperimentManifest manifest;
    manifest.mechanism = Mechanism::Pmm;
    manifest.dim = 1;
    manifest.eps = 1.0;
    manifest.n_values = {256, 512, 1024, 2048};
    manifest.trials = 4;
    manifest.seed = 11;

    const RateReport a = run_rate(manifest);
    const RateReport b = run_rate(manifest);
    REQUIRE(a.points.size() == 4);
    CHECK(a.slope == b.slope);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].mean_w1 == b.points[i].mean_w1);
        CHECK(a.points[i].failures == 0);
        CHECK(a.points[i].mean_w1 <= a.points[i].mean_theory_bound);
    }
    CHECK(a.slope < -0.3);  // W1 shrinks markedly with n
    CHECK(a.points.front().mean_w1 > a.points.back().mean_w1);
}

TEST_CASE("single-trial sweeps differ by seed but share the schema") {
    ExperimentManifest manifest;
    manifest.mechanism = Mechanism::Pmm;
    manifest.dim = 1;
    manifest.eps = 1.0;
    manifest.n_values = {256, 512, 1024, 2048};
    manifest.trials = 1;

    manifest.seed = 1;
    const RateReport a = run_rate(manifest);
    manifest.seed = 2;
    const RateReport b = run_rate(manifest);
    REQUIRE(a.points.size() == b.points.size());
    bool any_differ = false;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].n == b.points[i].n);
        CHECK(a.points[i].trials_ok == 1);
        CHECK(a.points[i].stderr_w1 == 0.0);
        any_differ = any_differ || a.points[i].mean_w1 != b.points[i].mean_w1;
    }
    CHECK(any_differ);
}

TEST_CASE("generate metadata reproduces the run") {
    ExperimentManifest manifest;
    manifest.mechanism = Mechanism::Psmm;
    manifest.dim = 2;
    manifest.eps = 1.0;
    manifest.n_values = {64};
    manifest.seed = 9;

    const GenerateOutput once = run_generate(manifest, nullptr);
    const GenerateOutput twice = run_generate(manifest, nullptr);
    CHECK(once.synthetic.coords == twice.synthetic.coords);
    CHECK(once.metadata_json == twice.metadata_json);

    const nlohmann::json meta = nlohmann::json::parse(once.metadata_json);
    CHECK(meta["mechanism"] == "psmm");
    CHECK(meta["cells"] == 64);      // ceil(sqrt(64)) = 8 per axis
    CHECK(meta["q"] == 10'000);
    CHECK(meta["source_points"] == 64);
    CHECK(meta["output_points"] == once.synthetic.size());
}

TEST_CASE("manifest validation") {
    ExperimentManifest bad;
    bad.eps = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.eps = 1.0;
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
