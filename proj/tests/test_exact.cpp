#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ldp/errors.hpp"
#include "ldp/exact.hpp"
#include "ldp/partition.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <numbers>

using namespace ldp;

namespace {

// Independent oracle: expand prod_{i<j} (x_i - x_j)(x_i^theta - x_j^theta) into
// monomials and integrate each against x^a e^{-tau x} with (k+a)!/tau^{k+a+1}.
using Poly = std::map<std::vector<int>, ExactScalar>;

Poly multiply_binomial(const Poly& p, int i, int j, int power) {
    Poly out;
    for (const auto& [mono, c] : p) {
        auto a = mono;
        a[i] += power;
        out[a] += c;
        auto b = mono;
        b[j] += power;
        out[b] -= c;
    }
    return out;
}

ExactScalar oracle_moment(long k, long a, const ExactScalar& tau) {
    boost::multiprecision::cpp_int f = 1;
    for (long i = 2; i <= k + a; ++i) f *= i;
    ExactScalar t = 1;
    for (long i = 0; i < k + a + 1; ++i) t *= tau;
    return ExactScalar(f) / t;
}

ExactScalar brute_force_partition(int m, int theta, long a, const ExactScalar& tau) {
    Poly p;
    p[std::vector<int>(m, 0)] = 1;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            p = multiply_binomial(p, i, j, 1);
            p = multiply_binomial(p, i, j, theta);
        }
    ExactScalar z = 0;
    for (const auto& [mono, c] : p) {
        if (c == 0) continue;
        ExactScalar term = c;
        for (int e : mono) term *= oracle_moment(e, a, tau);
        z += term;
    }
    return z;
}

double quad2(const std::function<double(double, double)>& f, double lo, double hi) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto outer = [&](double x) {
        auto inner = [&](double y) { return f(x, y); };
        return GK::integrate(inner, lo, x, 12, 1e-12) + GK::integrate(inner, x, hi, 12, 1e-12);
    };
    return GK::integrate(outer, lo, hi, 12, 1e-12);
}

} // namespace

TEST_CASE("moment examples") {
    CHECK(moment(LaguerreType{0, 1}, 0) == 1);
    CHECK(moment(LaguerreType{2, 1}, 3) == 120);
    CHECK(moment(LaguerreType{0, 2}, 1) == ExactScalar(1) / 4);
    CHECK_THROWS_AS(moment(make_gaussian_wd(2.0), 2, 1), UnsupportedError);
}

TEST_CASE("biorthogonal norms") {
    TauRule one{1, 1, false};
    auto s0 = biorthogonalize(make_bosonic(0, one), 2);
    CHECK(s0.h[0] == 1);
    CHECK(s0.h[1] == 4);
    auto s1 = biorthogonalize(make_bosonic(1, one), 2);
    CHECK(s1.h[0] == 1);
    CHECK(s1.h[1] == 12);
    auto l = biorthogonalize(make_laguerre(3, 0, one), 1);
    CHECK(l.h[0] == 1);
    CHECK_THROWS_AS(biorthogonalize(make_bosonic(0, one), 9), DomainError);
}

TEST_CASE("norms follow 2^j j! (2j+alpha)! and j! theta^j (theta j + l)!") {
    TauRule one{1, 1, false};
    for (int alpha = 0; alpha <= 2; ++alpha) {
        auto s = biorthogonalize(make_bosonic(alpha, one), 5);
        for (int j = 0; j < 5; ++j)
            CHECK(s.h[j] == ExactScalar(1 << j) * factorial(j) * factorial(2 * j + alpha));
    }
    for (int theta : {1, 3}) {
        auto s = biorthogonalize(make_laguerre(theta, 1, one), 4);
        for (int j = 0; j < 4; ++j) {
            ExactScalar pw = 1;
            for (int k = 0; k < j; ++k) pw *= theta;
            CHECK(s.h[j] == factorial(j) * pw * factorial(theta * j + 1));
        }
    }
}

TEST_CASE("biorthogonality and monic structure") {
    auto spec = make_bosonic(1, TauRule{3, 2, false});
    auto s = biorthogonalize(spec, 4);
    auto w = laguerre_type(spec, 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(s.p_polys[i][i] == 1);
        CHECK(s.q_polys[i][i] == 1);
        for (int k = i + 1; k < 4; ++k) {
            CHECK(s.p_polys[i][k] == 0);
            CHECK(s.q_polys[i][k] == 0);
        }
        for (int j = 0; j < 4; ++j)
            CHECK(pairing(w, 2, s.p_polys[i], s.q_polys[j]) == (i == j ? s.h[i] : ExactScalar(0)));
    }
}

TEST_CASE("partition_exact examples") {
    TauRule one{1, 1, false};
    CHECK(partition_exact(make_bosonic(0, one), 1) == 1);
    CHECK(partition_exact(make_bosonic(0, one), 2) == 8);
    CHECK(partition_exact(make_bosonic(1, one), 2) == 24);
    CHECK(to_fraction_string(partition_exact(make_bosonic(0, one), 2)) == "8/1");
}

TEST_CASE("exact path equals the brute-force expansion") {
    std::vector<TauRule> taus = {TauRule{1, 1, false}, TauRule{3, 2, false}, TauRule{1, 1, true}};
    for (const auto& tau : taus)
        for (int n = 1; n <= 4; ++n) {
            for (int alpha = 0; alpha <= 2; ++alpha) {
                auto spec = make_bosonic(alpha, tau);
                auto w = laguerre_type(spec, n);
                CHECK(partition_exact(spec, n) == brute_force_partition(n, 2, w.a, w.tau));
            }
            for (int theta : {1, 3})
                for (int l : {0, 1}) {
                    auto spec = make_laguerre(theta, l, tau);
                    auto w = laguerre_type(spec, n);
                    CHECK(partition_exact(spec, n) == brute_force_partition(n, theta, w.a, w.tau));
                }
        }
}

TEST_CASE("n! det g equals n! prod h") {
    for (int n = 1; n <= 6; ++n) {
        auto s = biorthogonalize(make_laguerre(2, 1, TauRule{5, 3, false}), n);
        ExactScalar prod = 1;
        for (auto& h : s.h) prod *= h;
        CHECK(determinant(s.gram) == prod);
    }
}

TEST_CASE("closed form matches the exact path") {
    std::vector<TauRule> taus = {TauRule{1, 1, false}, TauRule{3, 2, false}, TauRule{2, 1, true}};
    for (const auto& tau : taus)
        for (int n = 1; n <= 4; ++n) {
            for (int alpha = 0; alpha <= 2; ++alpha) {
                auto spec = make_bosonic(alpha, tau);
                double exact = to_double(partition_exact(spec, n));
                CHECK(std::exp(partition_closed_form(spec, n)) == doctest::Approx(exact).epsilon(1e-10));
            }
            for (int theta : {1, 2, 3}) {
                auto spec = make_laguerre(theta, 2, tau);
                double exact = to_double(partition_exact(spec, n));
                CHECK(std::exp(partition_closed_form(spec, n)) == doctest::Approx(exact).epsilon(1e-10));
            }
        }
}

TEST_CASE("closed form examples") {
    CHECK(partition_closed_form(make_bosonic(0, TauRule{1, 1, false}), 2) == doctest::Approx(std::log(8.0)));
    CHECK(partition_closed_form(make_gaussian_wd(2.0), 1) == doctest::Approx(0.5 * std::log(2 * std::numbers::pi)));
    // half-line Gaussian: int_0^inf e^{-x^2/2} dx = sqrt(pi/2)
    CHECK(partition_closed_form(make_bdg(BdGClass::D), 1) == doctest::Approx(0.5 * std::log(std::numbers::pi / 2)));
    CHECK_THROWS_AS(partition_closed_form(make_grid_custom({{0.0, 1.0}, {0.0, 0.0}}, 1, 1.0, 1.0,
                                                           DensityForm::Biorthogonal), 2),
                    UnsupportedError);
}

TEST_CASE("gaussian closed form at two points against the rotated integral") {
    for (double beta : {1.0, 2.0, 4.0}) {
        double c = 2 * beta / 4.0;  // n = 2
        double ref = std::pow(2.0, beta / 2) * std::tgamma((beta + 1) / 2) * std::pow(c, -(beta + 1) / 2) *
                     std::sqrt(std::numbers::pi / c);
        CHECK(partition_closed_form(make_gaussian_wd(beta), 2) == doctest::Approx(std::log(ref)).epsilon(1e-12));
    }
}

TEST_CASE("half-line Selberg closed form at two points against quadrature") {
    for (double beta : {1.0, 2.0})
        for (double e : {0.0, 1.0, 2.5})
            for (double c : {0.5, 1.3}) {
                auto f = [&](double x, double y) {
                    return std::pow(std::fabs(x * x - y * y), beta) * std::pow(x * y, e) *
                           std::exp(-c * (x * x + y * y));
                };
                double ref = quad2(f, 0.0, 12.0);
                CHECK(log_z_half_selberg(beta, e, c, 2) == doctest::Approx(std::log(ref)).epsilon(1e-8));
            }
}

TEST_CASE("xi_asymptotic closed-form constants") {
    CHECK(xi_asymptotic(make_bosonic(0)) == doctest::Approx(3 * (1 - std::log(2.0))));
    CHECK(xi_asymptotic(make_gaussian_wd(2.0)) == doctest::Approx(-0.5));
    CHECK(xi_asymptotic(make_laguerre(2, 0)) == doctest::Approx(3 - std::log(2.0)));
    CHECK(xi_asymptotic(make_bdg(BdGClass::C)) == doctest::Approx(-2 * std::log(4.0) + 3));
}

TEST_CASE("xi_empirical examples") {
    // same-weight convention reproduces the closed-form bosonic constant 3(1 - log 2) = 0.9206
    CHECK(std::fabs(xi_empirical(make_bosonic(0), 500, XiConvention::SameWeight) - 3 * (1 - std::log(2.0))) < 0.05);
    CHECK(std::fabs(xi_empirical(make_bdg(BdGClass::C), 500) - (-2 * std::log(4.0) + 3)) < 0.05);
    // Wigner-Dyson: beta/2 (same weight) and 3 beta/4 (proof), neither equals -beta/4
    CHECK(std::fabs(xi_empirical(make_gaussian_wd(2.0), 500, XiConvention::SameWeight) - 1.0) < 0.02);
    CHECK(std::fabs(xi_empirical(make_gaussian_wd(2.0), 500) - 1.5) < 0.02);
    CHECK_THROWS_AS(xi_empirical(make_bosonic(0), 1), DomainError);
}

TEST_CASE("xi_empirical converges monotonically") {
    double ln2 = std::log(2.0);
    struct Case {
        EnsembleSpec spec;
        XiConvention conv;
        double limit;
    };
    std::vector<Case> cases = {
        {make_bosonic(0), XiConvention::Proof, 4.5 - 3 * ln2},
        {make_bosonic(0), XiConvention::SameWeight, 3 - 3 * ln2},
        {make_gaussian_wd(1.0), XiConvention::Proof, 0.75},
        {make_gaussian_wd(4.0), XiConvention::Proof, 3.0},
        {make_laguerre(2, 0), XiConvention::SameWeight, 3 * (1 - ln2)},
        {make_laguerre(3, 0), XiConvention::Proof, 4 * (1 - std::log(3.0)) + 2},
        {make_bdg(BdGClass::B), XiConvention::Proof, xi_asymptotic(make_bdg(BdGClass::B))},
        {make_bdg(BdGClass::D), XiConvention::Proof, xi_asymptotic(make_bdg(BdGClass::D))},
        {make_bdg(BdGClass::C), XiConvention::Proof, xi_asymptotic(make_bdg(BdGClass::C))},
        {make_bdg(BdGClass::CI), XiConvention::Proof, xi_asymptotic(make_bdg(BdGClass::CI))},
        {make_chiral(ChiralClass::AIII, 0.25), XiConvention::SameWeight,
         xi_asymptotic(make_chiral(ChiralClass::AIII, 0.25))},
        {make_chiral(ChiralClass::CII, 0.4), XiConvention::SameWeight,
         xi_asymptotic(make_chiral(ChiralClass::CII, 0.4))},
    };
    for (auto& c : cases) {
        double prev = kInf;
        for (int n : {50, 100, 200, 400}) {
            double d = std::fabs(xi_empirical(c.spec, n, c.conv) - c.limit);
            CHECK(d < prev);
            prev = d;
        }
        CHECK(prev < 0.05);
    }
}

TEST_CASE("conventions differ by kappa int log w dmu") {
    // bosonic: int log w d rho = -3/2; Wigner-Dyson: -beta/4; BdG D: -1
    auto gap = [](const EnsembleSpec& s, int n) {
        return xi_empirical(s, n, XiConvention::SameWeight) - xi_empirical(s, n, XiConvention::Proof);
    };
    CHECK(gap(make_bosonic(0), 20000) == doctest::Approx(-1.5).epsilon(2e-3));
    CHECK(gap(make_gaussian_wd(2.0), 20000) == doctest::Approx(-0.5).epsilon(2e-3));
    CHECK(gap(make_bdg(BdGClass::D), 20000) == doctest::Approx(-1.0).epsilon(2e-3));
    // Laguerre theta: mean of the limiting measure is (theta+1)/2
    CHECK(gap(make_laguerre(3, 0), 20000) == doctest::Approx(-2.0).epsilon(2e-3));
    CHECK(gap(make_laguerre(5, 0), 20000) == doctest::Approx(-3.0).epsilon(2e-3));
}
