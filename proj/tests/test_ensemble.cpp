#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ldp/ensemble.hpp"
#include "ldp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

using namespace ldp;

TEST_CASE("log_weight examples") {
    auto fixed = make_bosonic(0, TauRule{1, 1, false});
    CHECK(log_weight(fixed, 1, 1.0) == doctest::Approx(-1.0));

    auto b2 = make_bosonic(2);
    CHECK(log_weight(b2, 4, 1.0) == doctest::Approx(-4.0));

    auto b1 = make_bosonic(1);
    CHECK(log_weight(b1, 7, 0.0) == -kInf);
    CHECK(log_weight(make_bosonic(0), 3, 0.0) == 0.0);
    CHECK_THROWS_AS(log_weight(b1, 3, -0.5), DomainError);
}

TEST_CASE("factorized weight agrees with the naive power") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.05, 4.0);
    auto bos = make_bosonic(2);
    auto bdg = make_bdg(BdGClass::CI);
    auto chi = make_chiral(ChiralClass::AIII, 0.25);
    for (int k = 0; k < 200; ++k) {
        double x = ux(rng);
        int n = 1 + k % 9;
        double naive = std::pow(x, 2.0) * std::exp(-double(n) * x);
        CHECK(std::exp(log_weight(bos, n, x)) == doctest::Approx(naive).epsilon(1e-12));
        naive = std::pow(x, 1.0) * std::exp(-double(n) * x * x / 4.0);
        CHECK(std::exp(log_weight(bdg, n, x)) == doctest::Approx(naive).epsilon(1e-12));
        auto [s, t] = chiral_st(chi, n + 3);
        naive = std::pow(x, 2.0 * (t - s) + 1.0) * std::exp(-double(n + 3) * x * x / 2.0);
        if (naive > 1e-250)
            CHECK(std::exp(log_weight(chi, n + 3, x)) == doctest::Approx(naive).epsilon(1e-12));
    }
}

TEST_CASE("log_joint_density examples") {
    auto wd = make_gaussian_wd(2.0);
    CHECK(log_joint_density(wd, {1, {0.7}}) == doctest::Approx(log_weight(wd, 1, 0.7)));
    CHECK(log_joint_density(wd, {3, {0.1, -0.4, 0.1}}) == -kInf);

    auto b = make_bosonic(0, TauRule{1, 1, false});
    CHECK(log_joint_density(b, {2, {1.0, 2.0}}) == doctest::Approx(std::log(3.0) - 3.0));

    CHECK_THROWS_AS(log_joint_density(b, {3, {1.0, 2.0}}), DomainError);
    CHECK_THROWS_AS(log_joint_density(b, {2, {1.0, -2.0}}), DomainError);
}

TEST_CASE("log_joint_density is permutation symmetric") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    for (auto spec : {make_bosonic(1), make_bdg(BdGClass::C), make_laguerre(3, 1)}) {
        std::vector<double> v(6);
        for (double& x : v) x = u(rng);
        double ref = log_joint_density(spec, {6, v});
        for (int k = 0; k < 10; ++k) {
            std::shuffle(v.begin(), v.end(), rng);
            CHECK(log_joint_density(spec, {6, v}) == doctest::Approx(ref).epsilon(1e-13));
        }
    }
}

TEST_CASE("log_joint_density blows down as two coordinates merge") {
    auto spec = make_bosonic(0);
    double prev = kInf;
    for (double gap = 1e-1; gap > 1e-12; gap /= 10) {
        double v = log_joint_density(spec, {3, {1.0, 1.0 + gap, 2.5}});
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < -40);
}

TEST_CASE("theta = 1, beta = 2 two-factor form equals the beta form") {
    auto beta_form = make_gaussian_wd(2.0);
    auto bi_form = beta_form;
    bi_form.form = DensityForm::Biorthogonal;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int k = 0; k < 50; ++k) {
        std::vector<double> v(5);
        for (double& x : v) x = g(rng);
        CHECK(log_joint_density(bi_form, {5, v}) == doctest::Approx(log_joint_density(beta_form, {5, v})).epsilon(1e-13));
    }
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(make_chiral(ChiralClass::BDI, 0.6), ConfigError);
    EnsembleSpec s = make_bosonic(0);
    s.support = {Interval{-1.0, kInf}};
    CHECK_THROWS_AS(validate(s), ConfigError);
    s = make_bosonic(0);
    s.kappa = 0.5;
    CHECK_THROWS_AS(validate(s), ConfigError);
    CHECK_NOTHROW(make_chiral(ChiralClass::CII, 0.4));
}

TEST_CASE("angelesco density examples") {
    AngelescoSpec a;
    a.intervals = {Interval{-2.0, -0.5}, Interval{0.5, 4.0}};
    a.potentials = {[](double x) { return x * x; }, [](double x) { return 0.5 * x; }};
    a.ratios = {0.5, 0.5};
    validate(a);
    int n = 3;
    double v = log_joint_density_angelesco(a, {{-1.0}, {2.0}}, n);
    CHECK(v == doctest::Approx(std::log(3.0) - n * (1.0 + 1.0)));
    CHECK(log_joint_density_angelesco(a, {{-1.0, -1.0}, {2.0}}, n) == -kInf);
    CHECK_THROWS_AS(log_joint_density_angelesco(a, {{0.0}, {2.0}}, n), DomainError);

    AngelescoSpec z;
    z.intervals = {Interval{0.0, 1.0}, Interval{2.0, 4.0}};
    z.potentials = {[](double) { return 0.0; }, [](double) { return 0.0; }};
    z.ratios = {2.0 / 3.0, 1.0 / 3.0};
    CHECK(log_joint_density_angelesco(z, {{0.0, 1.0}, {3.0}}, 3) == doctest::Approx(std::log(6.0)));

    AngelescoSpec bad = z;
    bad.intervals = {Interval{0.0, 2.5}, Interval{2.0, 4.0}};
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("lemma bound examples") {
    auto b = make_bosonic(0);
    double edge = *known_right_edge(b);
    CHECK(lemma_bound_check(b, 6.0, 6.0, 5, 1e-9));
    CHECK(lemma_bound_check(b, 30.0, 29.0, 5, 4.0));
    CHECK_FALSE(lemma_bound_check(b, 6.0, 2.0, 5, 0.0));
    CHECK_THROWS_AS(lemma_bound_check(b, edge - 0.5, 1.0, 5, 4.0), DomainError);
}

TEST_CASE("lemma bound holds on random cases with the estimated constant") {
    std::mt19937_64 rng(2024);
    for (auto spec : {make_bosonic(0), make_bosonic(2), make_bdg(BdGClass::B), make_bdg(BdGClass::CI)}) {
        auto c = estimate_lemma_constant(spec);
        CHECK(c.c >= 4.0);
        double edge = std::max(*known_right_edge(spec), 1.0);
        std::uniform_real_distribution<double> ux(edge, 60.0), ul(0.0, 80.0);
        std::uniform_int_distribution<int> un(1, 200);
        int fails = 0;
        for (int k = 0; k < 10000; ++k)
            if (!lemma_bound_check(spec, ux(rng), ul(rng), un(rng), c.c)) ++fails;
        CHECK(fails == 0);
    }
}

TEST_CASE("growth condition") {
    std::vector<double> grid;
    for (double x = 1.0; x <= 50.0; x += 0.5) grid.push_back(x);
    auto r = check_growth_condition(make_gaussian_wd(2.0), 0.5, grid);
    CHECK(r.pass);
    CHECK(r.value.back() < 1e-100);

    CHECK(check_growth_condition(make_bosonic(0), 0.5, grid).pass);

    GridCustom g;
    for (double x = 1.0; x <= 200.0; x += 1.0) {
        g.x.push_back(x);
        g.log_w.push_back(-std::log(x));
    }
    auto spec = make_grid_custom(g, 1, 1.0, 1.0, DensityForm::Biorthogonal);
    CHECK_FALSE(check_growth_condition(spec, 1.0, grid).pass);
    CHECK_THROWS_AS(check_growth_condition(spec, 1.0, {}), DomainError);
}

TEST_CASE("grid weight csv round trip") {
    const char* path = "grid_weight_test.csv";
    {
        std::ofstream out(path);
        out << "x,log_w\n0,0\n1,-1\n2,-2\n";
    }
    auto g = load_grid_custom_csv(path);
    std::remove(path);
    REQUIRE(g.x.size() == 3);
    CHECK(g.eval(1.5) == doctest::Approx(-1.5));
    CHECK(g.eval(2.5) == -kInf);
}
