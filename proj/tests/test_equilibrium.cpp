#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ldp/ensemble.hpp"
#include "ldp/equilibrium.hpp"
#include "ldp/errors.hpp"
#include "ldp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace ldp;

namespace {

void check_recovery(const EquilibriumResult& r, const SpectralMeasure& target) {
    double l1 = l1_distance(r.measure, target);
    MESSAGE("L1 " << l1 << " flatness " << r.flatness << " gap " << r.off_support_gap
                  << " iterations " << r.iterations);
    CHECK(l1 <= 0.05);
    CHECK(r.flatness <= 1e-3);
    CHECK(r.off_support_gap >= -1e-3);
}

} // namespace

TEST_CASE("simplex projection") {
    std::vector<double> v{0.2, 0.3, 0.5};
    project_simplex(v);
    CHECK(v[0] == doctest::Approx(0.2));
    CHECK(v[2] == doctest::Approx(0.5));

    v = {3.0, 0.0, -1.0};
    project_simplex(v);
    CHECK(v == std::vector<double>{1.0, 0.0, 0.0});

    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> x(7);
        for (double& e : x) e = g(rng);
        auto p = x;
        project_simplex(p);
        CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
        CHECK(*std::min_element(p.begin(), p.end()) >= 0.0);
        // optimality: <x - p, q - p> <= 0 for the simplex vertices q
        for (std::size_t j = 0; j < x.size(); ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - p[i]) * ((i == j ? 1.0 : 0.0) - p[i]);
            CHECK(s <= 1e-12);
        }
    }
}

TEST_CASE("uniform nodes are cell centres") {
    auto x = uniform_nodes(0.0, 1.0, 4);
    CHECK(x == std::vector<double>{0.125, 0.375, 0.625, 0.875});
    CHECK_THROWS_AS(uniform_nodes(1.0, 0.0, 4), ConfigError);
}

TEST_CASE("gaussian beta 2 recovers the semicircle") {
    auto r = solve_equilibrium(make_gaussian_wd(2.0), uniform_nodes(-2.5, 2.5, 512));
    check_recovery(r, SpectralMeasure(Semicircle{2.0}));
    for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k] <= r.history[k - 1]);
}

TEST_CASE("bosonic limit weight recovers rho") {
    auto r = solve_equilibrium(make_bosonic(0), uniform_nodes(0.0, 6.0, 512));
    check_recovery(r, SpectralMeasure(BosonicRho{}));
}

TEST_CASE("bdg class D recovers its limiting measure") {
    auto r = solve_equilibrium(make_bdg(BdGClass::D), uniform_nodes(0.0, 3.5, 512));
    check_recovery(r, SpectralMeasure(BdGMeasure{2.0, 1.0, 2.0, 1.0}));
}

TEST_CASE("iteration cap raises a convergence error with the last iterate") {
    EquilibriumOptions opt;
    opt.max_iter = 3;
    try {
        solve_equilibrium(make_gaussian_wd(2.0), uniform_nodes(-2.5, 2.5, 256), opt);
        FAIL("expected a convergence error");
    } catch (const EquilibriumNotConverged& e) {
        CHECK(e.last_iterate.size() == 256);
        CHECK(!e.history.empty());
    }
}

TEST_CASE("nodes outside the support get no mass") {
    auto r = solve_equilibrium(make_bdg(BdGClass::D), uniform_nodes(-1.0, 3.5, 256));
    const auto& g = r.measure.as_grid();
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (g.nodes[i] < 0) CHECK(g.weights[i] == 0.0);
}

TEST_CASE("angelesco with one component is the semicircle problem") {
    AngelescoSpec a;
    a.intervals = {Interval{-3.0, 3.0}};
    a.potentials = {[](double x) { return x * x / 2; }};
    a.ratios = {1.0};
    auto r = solve_angelesco(a, {uniform_nodes(-2.5, 2.5, 256)});
    CHECK(l1_distance(r.measures[0], SpectralMeasure(Semicircle{2.0})) <= 0.05);
    CHECK(r.flatness <= 1e-3);
}

TEST_CASE("symmetric angelesco pair is mirror symmetric") {
    AngelescoSpec a;
    a.intervals = {Interval{-3.0, -0.2}, Interval{0.2, 3.0}};
    a.potentials = {[](double x) { return x * x; }, [](double x) { return x * x; }};
    a.ratios = {0.5, 0.5};
    auto r = solve_angelesco(a, {uniform_nodes(-3.0, -0.2, 128), uniform_nodes(0.2, 3.0, 128)});
    const auto& g0 = r.measures[0].as_grid();
    const auto& g1 = r.measures[1].as_grid();
    double diff = 0.0;
    for (std::size_t i = 0; i < 128; ++i) diff = std::max(diff, std::fabs(g0.weights[i] - g1.weights[127 - i]));
    CHECK(diff < 1e-4);
    CHECK(r.flatness <= 1e-3);
    CHECK(r.off_support_gap >= -1e-3);
}
