#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ldp/ensemble.hpp"
#include "ldp/equilibrium.hpp"
#include "ldp/errors.hpp"
#include "ldp/format.hpp"
#include "ldp/partition.hpp"
#include "ldp/rate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace ldp;

namespace {

// composite Simpson of f on [a, b] after t = a + u^2, which removes a sqrt edge at a
template <class F>
double simpson_sqrt_edge(F f, double a, double b, int panels = 20000) {
    double U = std::sqrt(b - a), h = U / panels, s = 0.0;
    auto g = [&](double u) { return 2 * u * f(a + u * u); };
    for (int k = 0; k <= panels; ++k) {
        double w = (k == 0 || k == panels) ? 1 : (k % 2 ? 4 : 2);
        s += w * g(k * h);
    }
    return s * h / 3;
}

double goe_integrand(double t) { return std::sqrt(std::max(t * t / 4 - 1, 0.0)); }

std::vector<EnsembleSpec> shipped() {
    std::vector<EnsembleSpec> s{make_bosonic(0), make_gaussian_wd(1.0), make_gaussian_wd(2.0),
                                make_gaussian_wd(4.0)};
    for (auto c : {BdGClass::B, BdGClass::D, BdGClass::C, BdGClass::CI}) s.push_back(make_bdg(c));
    for (auto c : {ChiralClass::BDI, ChiralClass::AIII, ChiralClass::CII})
        for (double k : {0.25, 0.4}) s.push_back(make_chiral(c, k));
    return s;
}

} // namespace

TEST_CASE("rate_goe examples") {
    CHECK(rate_goe(2.0) == 0.0);
    CHECK(rate_goe(1.0) == kInf);
    CHECK(std::fabs(rate_goe(3.0) - simpson_sqrt_edge(goe_integrand, 2.0, 3.0)) < 1e-10);
}

TEST_CASE("rate_bdg_closed examples") {
    // psi sigma^2 beta kappa = 1/2 gives b_w = 1
    CHECK(rate_bdg_closed(1.0, 0.25, 2.0, 1.0, 1.0) == 0.0);
    double expect = 8 * (std::sqrt(3.0) - 0.5 * std::log(2 + std::sqrt(3.0)));
    CHECK(std::fabs(rate_bdg_closed(1.0, 0.25, 2.0, 1.0, 2.0) - expect) < 1e-9);
    CHECK(std::fabs(expect - 8.588576) < 1e-5);
    CHECK(rate_bdg_closed(1.0, 0.25, 2.0, 1.0, 0.5) == kInf);
    CHECK_THROWS_AS(rate_bdg_closed(-1.0, 0.25, 2.0, 1.0, 2.0), DomainError);
}

TEST_CASE("zeta examples") {
    auto d = make_rate_context(make_bdg(BdGClass::D));
    CHECK(std::fabs(d.zeta - (2 - 2 * std::numbers::ln2)) < 1e-8);

    auto bos = make_bosonic(0);
    SpectralMeasure rho(BosonicRho{});
    CHECK(std::fabs(zeta(bos, rho, 3 * (1 - std::numbers::ln2)) - (1.5 - 3 * std::numbers::ln2)) < 1e-6);

    GridCustom flat{{0.0, 1.0}, {0.0, 0.0}};
    auto spec = make_grid_custom(flat, 1, 2.0, 1.0, DensityForm::BetaTheta);
    spec.support = {Interval{0.0, 1.0}};
    CHECK(zeta(spec, SpectralMeasure::grid(uniform_nodes(0, 1, 8), std::vector<double>(8, 1.0)), 0.0) == 0.0);
}

TEST_CASE("context invariants") {
    for (const auto& s : shipped()) {
        auto ctx = make_rate_context(s);
        CAPTURE(s.family());
        CHECK(ctx.b_w == ctx.mu_w.b_w());
        CHECK(std::fabs(zeta(ctx.spec, ctx.mu_w, ctx.xi) - ctx.zeta) < 1e-8);
        if (auto e = known_right_edge(s)) CHECK(std::fabs(*e - ctx.b_w) < 1e-12);
    }
}

TEST_CASE("left of the edge is +inf") {
    for (const auto& s : shipped()) {
        auto ctx = make_rate_context(s);
        CHECK(rate_general(ctx, ctx.b_w - 0.1) == kInf);
    }
}

TEST_CASE("bdg quadrature rate agrees with the closed form") {
    for (auto c : {BdGClass::B, BdGClass::D, BdGClass::C, BdGClass::CI}) {
        auto ctx = make_rate_context(make_bdg(c));
        auto p = bdg_params(c);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            double x = ctx.b_w * (1.0 + 2.0 * k / 99.0);
            worst = std::max(worst, std::fabs(rate_general(ctx, x) - rate_bdg_closed(p.psi, 1.0, p.beta, 1.0, x)));
        }
        CAPTURE(int(c));
        CHECK(worst <= 1e-6);
        CHECK(std::fabs(rate_general(ctx, ctx.b_w)) <= 1e-4);
    }
}

TEST_CASE("gaussian beta 2 rate is twice the goe J") {
    auto ctx = make_rate_context(make_gaussian_wd(2.0));
    CHECK(std::fabs(rate_beta_theta(ctx, 2.0)) <= 1e-4);
    CHECK(std::fabs(rate_beta_theta(ctx, 3.0) - 2 * simpson_sqrt_edge(goe_integrand, 2.0, 3.0)) <= 1e-4);
    for (double x = 2.0; x <= 6.0; x += 0.25) CHECK(std::fabs(rate_general(ctx, x) - 2 * rate_goe(x)) <= 1e-4);
}

TEST_CASE("wigner-dyson rate is beta/2 times the goe-normalized curve") {
    for (double beta : {1.0, 4.0}) {
        auto ctx = make_rate_context(make_gaussian_wd(beta));
        for (double x : {2.5, 4.0}) CHECK(std::fabs(rate_general(ctx, x) - beta * rate_goe(x)) <= 1e-4);
    }
}

TEST_CASE("chiral integrand against the quadrature rate") {
    for (auto c : {ChiralClass::BDI, ChiralClass::AIII, ChiralClass::CII})
        for (double k : {0.25, 0.4}) {
            auto s = make_chiral(c, k);
            auto ctx = make_rate_context(s);
            double b = chiral_beta(c);
            CHECK(rate_chiral(b, 1.0, k, ctx.b_w) == 0.0);
            CHECK(rate_chiral(b, 1.0, k, 0.9 * ctx.b_w) == kInf);
            for (double f : {1.2, 1.7, 2.5})
                CHECK(std::fabs(rate_general(ctx, f * ctx.b_w) - rate_chiral(b, 1.0, k, f * ctx.b_w)) <= 1e-4);
        }
    CHECK_THROWS_AS(rate_chiral(2.0, 1.0, 0.6, 3.0), DomainError);
}

TEST_CASE("bosonic display") {
    double b = 3 * std::sqrt(3.0);
    CHECK(rate_bosonic(b - 0.01) == kInf);
    CHECK(std::fabs(rate_bosonic(b)) <= 1e-3);
    auto ctx = make_rate_context(make_bosonic(0));
    CHECK(std::fabs(ctx.xi - (3 * (1 - std::numbers::ln2) + 1.5)) < 1e-15);
    CHECK(std::fabs(rate_bosonic(6.0) - rate_general(ctx, 6.0)) <= 1e-6);
}

TEST_CASE("shipped contexts: zero at the edge, nonnegative, increasing, growing") {
    for (const auto& s : shipped()) {
        auto ctx = make_rate_context(s);
        CAPTURE(s.family());
        CAPTURE(s.kappa);
        double b = ctx.b_w;
        CHECK(std::fabs(rate_general(ctx, b)) <= 1e-3);
        double prev = rate_general(ctx, b);
        for (int k = 1; k <= 60; ++k) {
            double x = b * (1.0 + 2.0 * k / 60.0);
            double v = rate_general(ctx, x);
            if (x <= 2 * b) CHECK(v >= -1e-4);
            CHECK(v > prev);
            prev = v;
        }
        CHECK(rate_general(ctx, 10 * b) > rate_general(ctx, 2 * b) + 1);
        // approach to the edge from above
        double last = kInf;
        for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
            double v = rate_general(ctx, b * (1 + d));
            CHECK(v < last);
            CHECK(v >= rate_general(ctx, b) - 1e-4);
            last = v;
        }
    }
}

TEST_CASE("phi duality for bdg") {
    for (auto c : {BdGClass::B, BdGClass::D, BdGClass::C, BdGClass::CI}) {
        auto spec = make_bdg(c);
        auto ctx = make_rate_context(spec);
        auto p = bdg_params(c);
        for (int k = 0; k <= 20; ++k) {
            double x = ctx.b_w * (1.0 + 2.0 * k / 20.0);
            double lhs = spec.kappa * phi_limit(spec, ctx.mu_w, x) + ctx.xi;
            CHECK(std::fabs(lhs + rate_bdg_closed(p.psi, 1.0, p.beta, 1.0, x)) <= 1e-6);
        }
    }
}

TEST_CASE("finite-n phi converges to the limit") {
    for (const auto& spec : {make_bdg(BdGClass::C), make_bosonic(2)}) {
        auto ctx = make_rate_context(spec);
        double t = 1.5 * ctx.b_w;
        double lim = phi_limit(spec, ctx.mu_w, t);
        double prev = kInf;
        for (int n : {10, 100, 1000, 10000}) {
            double err = std::fabs(phi_tilde_n(spec, n, ctx.mu_w, t) - lim);
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 1e-2);
    }
}

TEST_CASE("angelesco with one component reduces to the gaussian beta 2 rate") {
    auto ctx = make_rate_context(make_gaussian_wd(2.0));
    AngelescoContext a;
    a.aspec.intervals = {Interval{-10.0, 10.0}};
    a.aspec.potentials = {[](double x) { return x * x / 2; }};
    a.aspec.ratios = {1.0};
    a.measures = {SpectralMeasure(Semicircle{2.0})};
    a.zeta_a = ctx.zeta;
    for (double x : {2.0, 2.5, 4.0}) CHECK(std::fabs(rate_angelesco(a, {x}) - rate_beta_theta(ctx, x)) < 1e-8);
    CHECK(rate_angelesco(a, {1.0}) == kInf);
    CHECK(rate_angelesco(a, {11.0}) == kInf);
    CHECK(std::fabs(angelesco_edge_zeta(a) - ctx.zeta) < 1e-4);
    a.measures.clear();
    CHECK_THROWS_AS(rate_angelesco(a, {2.0}), ConfigError);
}

TEST_CASE("symmetric angelesco pair at the right edges") {
    AngelescoSpec s;
    s.intervals = {Interval{-3.0, -0.2}, Interval{0.2, 3.0}};
    s.potentials = {[](double x) { return x * x; }, [](double x) { return x * x; }};
    s.ratios = {0.5, 0.5};
    auto eq = solve_angelesco(s, {uniform_nodes(-3.0, -0.2, 128), uniform_nodes(0.2, 3.0, 128)});
    AngelescoContext a{s, eq.measures, 0.0, false};
    std::vector<double> edges{support_right_edge(eq.measures[0]), support_right_edge(eq.measures[1])};
    double v = rate_angelesco(a, edges);
    MESSAGE("edges " << fmt(edges[0]) << " " << fmt(edges[1]) << " value " << fmt(v));
    // regression value from the 128-node solve, zeta_a = 0
    CHECK(std::fabs(v - 1.9978825652700192) < 1e-6);
    CHECK(rate_angelesco(a, {edges[0] - 0.1, edges[1]}) == kInf);

    a.zeta_a = angelesco_edge_zeta(a);
    CHECK(std::fabs(rate_angelesco(a, edges)) < 1e-12);
    a.symmetrized = true;
    CHECK(std::isfinite(rate_angelesco(a, {edges[0], edges[1] + 0.5})));
}

TEST_CASE("rate csv uses inf literals") {
    auto ctx = make_rate_context(make_gaussian_wd(2.0));
    auto curve = rate_curve(ctx, 1.0, 3.0, 5);
    const char* path = "rate_curve_test.csv";
    write_rate_csv(curve, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(path);
    CHECK(ss.str().rfind("x,rate\n1,inf\n1.5,inf\n2,", 0) == 0);
}
