#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpcube/dlaplace.hpp"
#include "dpcube/rng.hpp"

using dpcube::DiscreteLaplace;
using dpcube::RngStream;

namespace {

double truncated_mass(const DiscreteLaplace& d, std::int64_t radius) {
    double mass = d.pmf(0);
    for (std::int64_t z = 1; z <= radius; ++z) mass += d.pmf(z) + d.pmf(-z);
    return mass;
}

// Upper 0.999 chi-squared quantile, Wilson-Hilferty.
double chi2_crit_999(int df) {
    const double z = 3.0902323061678132;
    const double a = 2.0 / (9.0 * df);
    const double t = 1.0 - a + z * std::sqrt(a);
    return df * t * t * t;
}

}  // namespace

TEST_CASE("pmf values and symmetry") {
    const DiscreteLaplace d1(1.0);
    CHECK(d1.pmf(0) == doctest::Approx(0.46211715726000974).epsilon(1e-12));
    CHECK(d1.pmf(1) == d1.pmf(-1));
    CHECK(d1.pmf(17) == d1.pmf(-17));

    // Cross-check the point value against the truncated sum reaching ~1.
    CHECK(truncated_mass(d1, 60) == doctest::Approx(1.0).epsilon(1e-12));

    const DiscreteLaplace d2(2.0);
    CHECK(std::abs(truncated_mass(d2, 200) - 1.0) < 1e-12);
}

TEST_CASE("pmf mass sums to one across scales") {
    for (double sigma : {0.25, 0.5, 1.0, 2.0, 8.0}) {
        const DiscreteLaplace d(sigma);
        const auto radius = static_cast<std::int64_t>(std::ceil(60.0 * sigma));
        const double mass = truncated_mass(d, radius);
        CHECK(mass >= 1.0 - 1e-10);
        CHECK(mass <= 1.0 + 1e-12);
    }
}

TEST_CASE("deep tail pmf stays finite and positive") {
    const DiscreteLaplace d(0.5);
    const double tail = d.pmf(200);  // |z|/sigma = 400, well past exp(-x) precision loss
    CHECK(tail > 0.0);
    CHECK(tail == doctest::Approx(std::exp(d.log_pmf(200))).epsilon(1e-12));
    // Continuity across the log-space switchover at |z|/sigma = 30.
    const DiscreteLaplace unit(1.0);
    CHECK(unit.pmf(31) / unit.pmf(30) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("variance closed form and bound") {
    const DiscreteLaplace d1(1.0);
    CHECK(d1.variance() == doctest::Approx(1.8413471884155846).epsilon(1e-10));
    for (double sigma : {0.25, 0.5, 1.0, 2.0, 8.0, 100.0}) {
        const DiscreteLaplace d(sigma);
        CHECK(d.variance() < 2.0 * sigma * sigma);
    }
    // The gap to the continuous variance closes as sigma grows.
    CHECK(std::abs(DiscreteLaplace(1000.0).variance() / (2.0 * 1000.0 * 1000.0) - 1.0) < 1e-5);
    const double r10 = std::abs(DiscreteLaplace(10.0).variance() / 200.0 - 1.0);
    const double r100 = std::abs(DiscreteLaplace(100.0).variance() / 20000.0 - 1.0);
    CHECK(r100 < r10);
}

TEST_CASE("variance matches moment summation") {
    const DiscreteLaplace d(0.5);
    double m2 = 0.0;
    for (std::int64_t z = 1; z <= 100; ++z) m2 += 2.0 * static_cast<double>(z) * z * d.pmf(z);
    CHECK(d.variance() == doctest::Approx(m2).epsilon(1e-10));
}

TEST_CASE("cdf is a distribution function") {
    const DiscreteLaplace d(1.5);
    CHECK(d.cdf(200) == doctest::Approx(1.0));
    CHECK(d.cdf(-200) == doctest::Approx(0.0));
    for (std::int64_t z = -20; z < 20; ++z) {
        CHECK(d.cdf(z + 1) >= d.cdf(z));
        CHECK(d.cdf(z + 1) - d.cdf(z) == doctest::Approx(d.pmf(z + 1)).epsilon(1e-12));
        // Symmetry: P(Z <= -z-1) = P(Z >= z+1).
        CHECK(d.cdf(-z - 1) == doctest::Approx(1.0 - d.cdf(z)).epsilon(1e-12));
    }
}

TEST_CASE("sampler identity: difference of geometrics has the Lap_Z pmf") {
    // P(G1 - G2 = z) with G ~ geometric(1-p) on {0,1,...}, by brute-force
    // convolution; this is the identity the sampler relies on.
    for (double sigma : {0.5, 1.0, 3.0}) {
        const DiscreteLaplace d(sigma);
        const double p = d.p();
        auto geom = [&](std::int64_t k) { return (1.0 - p) * std::pow(p, static_cast<double>(k)); };
        for (std::int64_t z = -20; z <= 20; ++z) {
            double conv = 0.0;
            for (std::int64_t k = 0; k <= 800; ++k) {
                if (k + z >= 0) conv += geom(k + z) * geom(k);
            }
            CHECK(conv == doctest::Approx(d.pmf(z)).epsilon(1e-12));
        }
    }
}

TEST_CASE("sample moments and determinism") {
    const DiscreteLaplace d(1.0);
    const int n = 1'000'000;
    RngStream rng(20240817);
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto z = static_cast<double>(d.sample(rng));
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const double se_mean = std::sqrt(d.variance() / n);
    CHECK(std::abs(mean) <= 3.0 * se_mean);

    // Fourth moment from the pmf gives the variance estimator's spread.
    double m4 = 0.0;
    for (std::int64_t z = 1; z <= 200; ++z) {
        m4 += 2.0 * std::pow(static_cast<double>(z), 4.0) * d.pmf(z);
    }
    const double se_var = std::sqrt((m4 - d.variance() * d.variance()) / n);
    CHECK(std::abs(var - 1.8413471884155846) <= 3.0 * se_var);

    RngStream rng_a(7), rng_b(7);
    for (int i = 0; i < 1000; ++i) CHECK(d.sample(rng_a) == d.sample(rng_b));
}

TEST_CASE("sample distribution passes chi-squared at 0.001") {
    for (double sigma : {0.5, 1.0, 2.0}) {
        const DiscreteLaplace d(sigma);
        const auto edge = static_cast<std::int64_t>(std::ceil(10.0 * sigma));
        const int n = 1'000'000;
        RngStream rng(99 + static_cast<std::uint64_t>(sigma * 8));

        std::vector<long> observed(2 * edge + 3, 0);  // [-edge..edge] plus two tails
        for (int i = 0; i < n; ++i) {
            const std::int64_t z = d.sample(rng);
            if (z < -edge) {
                ++observed.front();
            } else if (z > edge) {
                ++observed.back();
            } else {
                ++observed[z + edge + 1];
            }
        }
        std::vector<double> expected(observed.size());
        expected.front() = n * d.cdf(-edge - 1);
        expected.back() = n * (1.0 - d.cdf(edge));
        for (std::int64_t z = -edge; z <= edge; ++z) expected[z + edge + 1] = n * d.pmf(z);

        // Merge outer bins until every expected count is >= 5.
        std::vector<double> exp_merged;
        std::vector<long> obs_merged;
        double e_acc = 0.0;
        long o_acc = 0;
        for (std::size_t i = 0; i < observed.size(); ++i) {
            e_acc += expected[i];
            o_acc += observed[i];
            if (e_acc >= 5.0) {
                exp_merged.push_back(e_acc);
                obs_merged.push_back(o_acc);
                e_acc = 0.0;
                o_acc = 0;
            }
        }
        if (e_acc > 0.0 && !exp_merged.empty()) {
            exp_merged.back() += e_acc;
            obs_merged.back() += o_acc;
        }

        double stat = 0.0;
        for (std::size_t i = 0; i < exp_merged.size(); ++i) {
            const double diff = obs_merged[i] - exp_merged[i];
            stat += diff * diff / exp_merged[i];
        }
        const int df = static_cast<int>(exp_merged.size()) - 1;
        CHECK(stat < chi2_crit_999(df));
    }
}

TEST_CASE("rejects bad scales") {
    CHECK_THROWS_AS(DiscreteLaplace(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteLaplace(-1.0), std::invalid_argument);
}
