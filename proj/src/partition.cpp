#include "ldp/partition.hpp"

#include "ldp/errors.hpp"

#include <cmath>
#include <numbers>

namespace ldp {

namespace {

// n log w_n(x) = A log x - B x^k, in one of three integration geometries.
enum class Shape { Laguerre, Gaussian, HalfGaussian };

struct WeightShape {
    Shape shape;
    double A;
    double B;
};

WeightShape weight_shape(const EnsembleSpec& spec, int n) {
    if (auto* w = std::get_if<Bosonic>(&spec.weight))
        return {Shape::Laguerre, double(w->alpha), w->tau.value(n)};
    if (auto* w = std::get_if<LaguerreBi>(&spec.weight))
        return {Shape::Laguerre, double(w->l_at(n)), w->tau.value(n)};
    if (auto* w = std::get_if<GaussianWD>(&spec.weight))
        return {Shape::Gaussian, 0.0, n * w->beta / 4.0};
    if (auto* w = std::get_if<BdG>(&spec.weight)) {
        auto p = bdg_params(w->cls);
        return {Shape::HalfGaussian, p.alpha, n / (p.psi * w->sigma2)};
    }
    if (auto* w = std::get_if<Chiral>(&spec.weight)) {
        auto [s, t] = chiral_st(spec, n);
        return {Shape::HalfGaussian, w->beta * (t - s) + w->beta - 1.0, n / (2.0 * w->sigma2)};
    }
    throw UnsupportedError("no closed-form partition function for this family");
}

double log_z_shape(const EnsembleSpec& spec, const WeightShape& w, int m) {
    switch (w.shape) {
    case Shape::Laguerre: return log_z_laguerre(spec.theta, w.A, w.B, m);
    case Shape::Gaussian: return log_z_gaussian(spec.beta, w.B, m);
    case Shape::HalfGaussian: return log_z_half_selberg(spec.beta, w.A, w.B, m);
    }
    return 0.0;
}

} // namespace

double log_z_laguerre(int theta, double a, double tau, int m) {
    if (m < 0 || tau <= 0 || a <= -1) throw DomainError("log_z_laguerre: bad parameters");
    double degree = 0.5 * m * (m - 1.0) * (theta + 1.0) + m * (a + 1.0);
    double s = -degree * std::log(tau) + std::lgamma(m + 1.0);
    for (int k = 0; k < m; ++k)
        s += std::lgamma(k + 1.0) + k * std::log(double(theta)) + std::lgamma(theta * k + a + 1.0);
    return s;
}

double log_z_gaussian(double beta, double c, int m) {
    if (m < 0 || c <= 0 || beta <= 0) throw DomainError("log_z_gaussian: bad parameters");
    double s = 0.5 * m * std::log(2.0 * std::numbers::pi) -
               (beta * m * (m - 1.0) / 4.0 + m / 2.0) * std::log(2.0 * c);
    for (int j = 1; j <= m; ++j) s += std::lgamma(1.0 + j * beta / 2.0) - std::lgamma(1.0 + beta / 2.0);
    return s;
}

double log_z_half_selberg(double beta, double e, double c, int m) {
    if (m < 0 || c <= 0 || beta <= 0 || e <= -1) throw DomainError("log_z_half_selberg: bad parameters");
    double g = beta / 2.0, u = (e + 1.0) / 2.0;
    double s = -(g * m * (m - 1.0) + u * m) * std::log(c) - m * std::log(2.0);
    for (int j = 0; j < m; ++j)
        s += std::lgamma(1.0 + g + j * g) + std::lgamma(u + j * g) - std::lgamma(1.0 + g);
    return s;
}

double partition_closed_form(const EnsembleSpec& spec, int n) {
    if (n < 1) throw DomainError("partition_closed_form: n must be >= 1");
    return log_z_shape(spec, weight_shape(spec, n), spec.p(n));
}

double xi_asymptotic(const EnsembleSpec& spec) {
    if (auto* w = std::get_if<Bosonic>(&spec.weight)) {
        if (!w->tau.per_n || w->tau.scale() != 1.0)
            throw UnsupportedError("xi_asymptotic: bosonic constant needs tau = n");
        return 3.0 * (1.0 - std::numbers::ln2);
    }
    if (auto* w = std::get_if<LaguerreBi>(&spec.weight)) {
        if (!w->tau.per_n || w->tau.scale() != 1.0)
            throw UnsupportedError("xi_asymptotic: laguerre constant needs tau = n");
        double th = w->theta;
        return th + w->l_slope + 1.0 - std::log(th);
    }
    if (auto* w = std::get_if<GaussianWD>(&spec.weight)) return -w->beta / 4.0;
    if (auto* w = std::get_if<BdG>(&spec.weight)) {
        auto p = bdg_params(w->cls);
        return -p.beta * std::log(p.beta * p.psi * w->sigma2 / 2.0) + 1.5 * p.beta;
    }
    if (auto* w = std::get_if<Chiral>(&spec.weight)) {
        double k = spec.kappa, b = w->beta;
        return -(b / 2.0) *
               (std::log(1.0 - k) + k * std::log(k / (1.0 - k)) + std::log(b * w->sigma2) - 1.0);
    }
    throw UnsupportedError("xi_asymptotic: no closed-form constant for this family");
}

XiConvention native_convention(const EnsembleSpec& spec) {
    if (std::holds_alternative<Bosonic>(spec.weight) || std::holds_alternative<LaguerreBi>(spec.weight) ||
        std::holds_alternative<Chiral>(spec.weight))
        return XiConvention::SameWeight;
    return XiConvention::Proof;
}

double xi_empirical(const EnsembleSpec& spec, int n, XiConvention conv) {
    if (n < 2) throw DomainError("xi_empirical: n must be >= 2");
    WeightShape full = weight_shape(spec, n);
    int m = spec.p(n);
    if (m < 2) throw DomainError("xi_empirical: needs at least two points");
    WeightShape reduced = full;
    if (conv == XiConvention::Proof) {
        double f = double(n - 1) / n;
        reduced.A *= f;
        reduced.B *= f;
    }
    return (log_z_shape(spec, reduced, m - 1) - log_z_shape(spec, full, m)) / n;
}

} // namespace ldp
