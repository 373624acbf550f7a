#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpcube/metrics.hpp"
#include "dpcube/rng.hpp"

using namespace dpcube;

namespace {

DiscreteSignedMeasure dirac(std::vector<double> point) {
    DiscreteSignedMeasure m;
    m.dim = static_cast<int>(point.size());
    m.push(point, 1.0);
    return m;
}

DiscreteSignedMeasure random_probability(RngStream& rng, int dim, int support) {
    DiscreteSignedMeasure m;
    m.dim = dim;
    std::vector<double> w(support);
    double total = 0.0;
    for (auto& v : w) {
        v = -std::log(rng.next_unit());
        total += v;
    }
    std::vector<double> p(dim);
    for (int i = 0; i < support; ++i) {
        for (auto& c : p) c = rng.next_half_open();
        m.push(p, w[i] / total);
    }
    return m;
}

Dataset random_dataset(RngStream& rng, int dim, int n) {
    Dataset d(dim);
    std::vector<double> p(dim);
    for (int i = 0; i < n; ++i) {
        for (auto& c : p) c = rng.next_half_open();
        d.push(p);
    }
    return d;
}

}  // namespace

TEST_CASE("w1_1d basics") {
    CHECK(w1_1d(dirac({0.0}), dirac({1.0})) == doctest::Approx(1.0));
    RngStream rng(3);
    const DiscreteSignedMeasure mu = random_probability(rng, 1, 9);
    CHECK(w1_1d(mu, mu) == doctest::Approx(0.0));

    DiscreteSignedMeasure not_prob = mu;
    not_prob.weights[0] += 0.5;
    CHECK_THROWS_AS(w1_1d(not_prob, mu), std::invalid_argument);
}

TEST_CASE("w1_1d agrees with the transport LP") {
    RngStream rng(5);
    for (int rep = 0; rep < 200; ++rep) {
        const int ka = 1 + static_cast<int>(rng.next_below(20));
        const int kb = 1 + static_cast<int>(rng.next_below(20));
        const DiscreteSignedMeasure mu = random_probability(rng, 1, ka);
        const DiscreteSignedMeasure nu = random_probability(rng, 1, kb);
        CHECK(w1_1d(mu, nu) == doctest::Approx(w1_lp(mu, nu)).epsilon(1e-9));
    }
}

TEST_CASE("w1_lp basics") {
    CHECK(w1_lp(dirac({0.0, 0.0}), dirac({1.0, 1.0})) == doctest::Approx(1.0));

    // Forced plan: half the mass moves from a to b.
    DiscreteSignedMeasure mu;
    mu.dim = 2;
    mu.push({0.1, 0.2}, 0.5);
    mu.push({0.8, 0.4}, 0.5);
    const double expected = 0.5 * linf_distance(mu.point(0), mu.point(1));
    DiscreteSignedMeasure nu;
    nu.dim = 2;
    nu.push({0.1, 0.2}, 1.0);
    CHECK(w1_lp(mu, nu) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("w1_lp support guard") {
    DiscreteSignedMeasure big;
    big.dim = 1;
    for (int i = 0; i < 1200; ++i) big.push({i / 1200.0}, 1.0 / 1200.0);
    DiscreteSignedMeasure other;
    other.dim = 1;
    for (int i = 0; i < 900; ++i) other.push({(i + 0.3) / 900.0}, 1.0 / 900.0);
    CHECK_THROWS_AS(w1_lp(big, other), std::invalid_argument);
}

TEST_CASE("metric axioms on random triples") {
    RngStream rng(11);
    for (int rep = 0; rep < 25; ++rep) {
        const int dim = 1 + static_cast<int>(rng.next_below(3));
        const DiscreteSignedMeasure a = random_probability(rng, dim, 5);
        const DiscreteSignedMeasure b = random_probability(rng, dim, 6);
        const DiscreteSignedMeasure c = random_probability(rng, dim, 4);
        const double ab = w1_lp(a, b), ba = w1_lp(b, a);
        const double bc = w1_lp(b, c), ac = w1_lp(a, c);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
        CHECK(ac <= ab + bc + 1e-8);
        CHECK(w1_lp(a, a) == doctest::Approx(0.0));
        CHECK(ab >= 0.0);
    }
}

TEST_CASE("d_bl basics") {
    DiscreteSignedMeasure a, b;
    a.dim = b.dim = 2;
    a.push({0.3, 0.3}, 1.2);
    b.push({0.3, 0.3}, 1.0);
    CHECK(d_bl(a, b) == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(d_bl(a, a) == doctest::Approx(0.0));

    DiscreteSignedMeasure mismatched;
    mismatched.dim = 2;
    mismatched.push({0.4, 0.4}, 1.0);
    CHECK_THROWS_AS(d_bl(a, mismatched), std::invalid_argument);
}

TEST_CASE("d_bl equals W1 on probability pairs") {
    RngStream rng(13);
    for (int rep = 0; rep < 60; ++rep) {
        const int dim = 1 + static_cast<int>(rng.next_below(3));
        const int support = 2 + static_cast<int>(rng.next_below(11));
        // Common support with two random weight vectors.
        DiscreteSignedMeasure a = random_probability(rng, dim, support);
        DiscreteSignedMeasure b = a;
        double total = 0.0;
        for (auto& w : b.weights) {
            w = -std::log(rng.next_unit());
            total += w;
        }
        for (auto& w : b.weights) w /= total;
        CHECK(d_bl(a, b) == doctest::Approx(w1_lp(a, b)).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("snapped distance of identical datasets is zero") {
    RngStream rng(17);
    const Dataset data = random_dataset(rng, 2, 500);
    const SnappedW1 out = w1_grid_snapped(data, data, 12);
    CHECK(out.value == 0.0);
    CHECK(out.error_bound == doctest::Approx(2.0 / 64.0));
}

TEST_CASE("snapped distance converges to the exact one") {
    RngStream rng(19);
    for (int dim : {1, 2, 3}) {
        const Dataset a = random_dataset(rng, dim, 40);
        const Dataset b = random_dataset(rng, dim, 35);
        const double exact = w1_lp(empirical_measure(a), empirical_measure(b));
        double prev_bound = 10.0;
        for (int depth : {4 * dim, 6 * dim, 8 * dim}) {
            const SnappedW1 out = w1_grid_snapped(a, b, depth);
            CHECK(std::abs(out.value - exact) <= out.error_bound);
            CHECK(out.error_bound <= prev_bound);
            prev_bound = out.error_bound;
        }
        const SnappedW1 fine = w1_grid_snapped(a, b, 16 * dim);
        CHECK(std::abs(fine.value - exact) <= fine.error_bound);
        CHECK(fine.error_bound == 2.0 * std::ldexp(1.0, -16));
    }
}

TEST_CASE("snapped flow route agrees with the exact LP on medium inputs") {
    // Enough occupied cells to force the min-cost-flow path, yet small
    // enough for the raw coupling LP oracle.
    RngStream rng(23);
    const Dataset a = random_dataset(rng, 2, 150);
    const Dataset b = random_dataset(rng, 2, 140);
    const double exact = w1_lp(empirical_measure(a), empirical_measure(b));
    const SnappedW1 out = w1_grid_snapped(a, b, 16);  // 256x256 cells, support ~290
    CHECK(std::abs(out.value - exact) <= out.error_bound);
    // At this resolution collisions are rare, so the snapped value should be
    // much closer than the worst-case bound.
    CHECK(std::abs(out.value - exact) <= 0.25 * out.error_bound);
}

TEST_CASE("snapped guards") {
    RngStream rng(29);
    const Dataset a = random_dataset(rng, 2, 10);
    const Dataset b = random_dataset(rng, 3, 10);
    CHECK_THROWS_AS(w1_grid_snapped(a, b, 8), std::invalid_argument);
    CHECK_THROWS_AS(w1_grid_snapped(Dataset(2), a, 8), std::invalid_argument);

    // Small supports may snap arbitrarily fine (the LP route never builds
    // the grid); large supports on an over-fine grid must be rejected.
    CHECK_NOTHROW(w1_grid_snapped(a, a, 60));
    const Dataset big_a = random_dataset(rng, 2, 400);
    const Dataset big_b = random_dataset(rng, 2, 400);
    CHECK_THROWS_AS(w1_grid_snapped(big_a, big_b, 60), std::invalid_argument);
}
