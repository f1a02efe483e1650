#include "ldp/rate.hpp"

#include "ldp/errors.hpp"
#include "ldp/format.hpp"
#include "ldp/partition.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace ldp {

namespace {

double log_w(const EnsembleSpec& spec, double x) { return log_weight_limit(spec, x); }

// int f dmu for f built from log weights, which may carry log x at a support endpoint
double integrate_weight(const SpectralMeasure& mu, const std::function<double(double)>& f) {
    return integrate(mu, f, {mu.a_w()});
}

// kernel of the density form integrated against mu, any t
double kernel_potential(const EnsembleSpec& spec, const SpectralMeasure& mu, double t) {
    if (spec.form == DensityForm::Biorthogonal)
        return log_potential(mu, t) + log_potential_power(mu, t, spec.theta);
    return spec.beta * log_potential_power(mu, t, spec.theta);
}

const SpectralMeasure& rho_infinity() {
    static const SpectralMeasure rho(BosonicRho{});
    return rho;
}

double bosonic_scale(const EnsembleSpec& spec, const char* who) {
    if (auto* w = std::get_if<Bosonic>(&spec.weight)) {
        if (!w->tau.per_n) throw UnsupportedError(std::string(who) + ": bosonic limit needs tau proportional to n");
        return w->tau.scale();
    }
    auto& w = std::get<LaguerreBi>(spec.weight);
    if (!w.tau.per_n || w.l_slope != 0.0)
        throw UnsupportedError(std::string(who) + ": laguerre limit needs tau proportional to n and fixed l");
    return w.tau.scale();
}

} // namespace

double xi_limit(const EnsembleSpec& spec) {
    if (std::holds_alternative<Bosonic>(spec.weight)) {
        if (bosonic_scale(spec, "xi_limit") != 1.0) throw UnsupportedError("xi_limit: bosonic constant needs tau = n");
        return 3.0 * (1.0 - std::numbers::ln2) + 1.5;
    }
    if (auto* w = std::get_if<LaguerreBi>(&spec.weight)) {
        if (bosonic_scale(spec, "xi_limit") != 1.0) throw UnsupportedError("xi_limit: laguerre constant needs tau = n");
        double th = w->theta;
        return (th + 1.0) * (1.0 - std::log(th)) + (th + 1.0) / 2.0;
    }
    if (auto* w = std::get_if<GaussianWD>(&spec.weight)) return 0.75 * w->beta;
    if (std::holds_alternative<BdG>(spec.weight)) return xi_asymptotic(spec);
    if (auto* w = std::get_if<Chiral>(&spec.weight)) {
        SpectralMeasure mu(ChiralMeasure{w->beta, w->sigma2, spec.kappa});
        return xi_asymptotic(spec) - spec.kappa * integrate_weight(mu, [&](double y) { return log_w(spec, y); });
    }
    throw UnsupportedError("xi_limit: no closed form for this family");
}

double zeta(const EnsembleSpec& spec, const SpectralMeasure& mu, double xi) {
    return spec.kappa * integrate_weight(mu, [&](double y) { return log_w(spec, y); }) + xi;
}

RateContext make_rate_context(const EnsembleSpec& spec, SpectralMeasure mu_w, double xi) {
    validate(spec);
    double b = support_right_edge(mu_w);
    double z = zeta(spec, mu_w, xi);
    return RateContext{spec, std::move(mu_w), b, xi, z};
}

std::optional<SpectralMeasure> limiting_measure(const EnsembleSpec& spec) {
    return std::visit(
        [&](const auto& w) -> std::optional<SpectralMeasure> {
            using W = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<W, Bosonic>) {
                if (!w.tau.per_n) return std::nullopt;
                return SpectralMeasure(BosonicRho{w.tau.scale()});
            } else if constexpr (std::is_same_v<W, LaguerreBi>) {
                if (w.theta != 2 || !w.tau.per_n || w.l_slope != 0.0) return std::nullopt;
                return SpectralMeasure(BosonicRho{w.tau.scale()});
            } else if constexpr (std::is_same_v<W, GaussianWD>) {
                return SpectralMeasure(Semicircle{2.0});
            } else if constexpr (std::is_same_v<W, BdG>) {
                auto p = bdg_params(w.cls);
                return SpectralMeasure(BdGMeasure{p.psi, w.sigma2, p.beta, spec.kappa});
            } else if constexpr (std::is_same_v<W, Chiral>) {
                return SpectralMeasure(ChiralMeasure{w.beta, w.sigma2, spec.kappa});
            } else {
                return std::nullopt;
            }
        },
        spec.weight);
}

RateContext make_rate_context(const EnsembleSpec& spec) {
    validate(spec);
    auto mu = limiting_measure(spec);
    if (!mu) throw UnsupportedError("rate context: no closed-form limiting measure; supply mu_w and xi");
    return make_rate_context(spec, std::move(*mu), xi_limit(spec));
}

double rate_biorthogonal(const RateContext& ctx, double x) {
    if (!(x >= ctx.b_w) || !ctx.spec.in_support(x)) return kInf;
    const auto& s = ctx.spec;
    return -s.kappa * (log_potential(ctx.mu_w, x) + log_potential_power(ctx.mu_w, x, s.theta)) -
           log_w(s, x) - ctx.zeta;
}

double rate_beta_theta(const RateContext& ctx, double x) {
    if (!(x >= ctx.b_w) || !ctx.spec.in_support(x)) return kInf;
    const auto& s = ctx.spec;
    return -s.kappa * s.beta * log_potential_power(ctx.mu_w, x, s.theta) - log_w(s, x) - ctx.zeta;
}

double rate_general(const RateContext& ctx, double x) {
    return ctx.spec.form == DensityForm::Biorthogonal ? rate_biorthogonal(ctx, x) : rate_beta_theta(ctx, x);
}

double rate_goe(double x) {
    if (!(x >= 2.0)) return kInf;
    double s = std::sqrt(x * x - 4.0);
    return x * s / 4.0 - std::log((x + s) / 2.0);
}

double rate_bdg_closed(double psi, double sigma2, double beta, double kappa, double x) {
    if (!(psi > 0 && sigma2 > 0 && beta > 0 && kappa > 0)) throw DomainError("rate_bdg_closed: parameters must be positive");
    double c = 2.0 * psi * sigma2 * beta * kappa;
    double b = std::sqrt(c);
    if (!(x >= b)) return kInf;
    double s = std::sqrt(x * x - c);
    // int_b^x sqrt(t^2 - c) dt
    double area = 0.5 * x * s - 0.5 * c * std::log((x + s) / b);
    return beta * kappa * (4.0 / c) * area;
}

double rate_chiral(double beta, double sigma2, double kappa, double x) {
    if (!(beta > 0 && sigma2 > 0 && kappa > 0 && kappa <= 0.5))
        throw DomainError("rate_chiral: need beta, sigma2 > 0 and 0 < kappa <= 1/2");
    ChiralMeasure m{beta, sigma2, kappa};
    double a = m.a(), b = m.b();
    double bw = std::sqrt(b);
    if (!(x >= bw)) return kInf;
    if (x == bw) return 0.0;
    auto f = [a, b](double t) { return std::sqrt(std::max((t * t - a) * (t * t - b), 0.0)) / t; };
    return integrate_interval(f, bw, x, Edge::Sqrt, Edge::Regular).value / sigma2;
}

double rate_bosonic(double x) {
    if (!(x >= 3.0 * std::sqrt(3.0))) return kInf;
    return -integrate_log_kernel(rho_infinity(), x, 2) + x - 3.0 * (1.0 - std::numbers::ln2);
}

double phi_limit(const EnsembleSpec& spec, const SpectralMeasure& mu, double t) {
    return kernel_potential(spec, mu, t) + log_w(spec, t) / spec.kappa +
           integrate_weight(mu, [&](double y) { return log_w(spec, y); });
}

double phi_n(const EnsembleSpec& spec, int n, const SpectralMeasure& mu, double t) {
    int p = spec.p(n);
    if (p < 2) throw DomainError("phi_n: needs p(n) >= 2");
    auto lwn = [&](double y) { return log_weight(spec, n, y) / n; };
    return kernel_potential(spec, mu, t) + double(n) / (p - 1) * lwn(t) + integrate_weight(mu, lwn);
}

double phi_tilde_n(const EnsembleSpec& spec, int n, const SpectralMeasure& mu, double t) {
    if (n < 2) throw DomainError("phi_tilde_n: needs n >= 2");
    double shift = integrate_weight(mu, [&](double y) {
        return (n - 1) * (log_weight(spec, n, y) / n - log_weight(spec, n - 1, y) / (n - 1));
    });
    return phi_n(spec, n, mu, t) + shift;
}

double support_right_edge(const SpectralMeasure& mu, double cut) {
    if (!mu.is_grid()) return mu.b_w();
    const auto& g = mu.as_grid();
    for (std::size_t i = g.weights.size(); i-- > 0;)
        if (g.weights[i] > cut) return g.edges[i + 1];
    return g.edges.front();
}

namespace {

double angelesco_body(const AngelescoContext& actx, const std::vector<double>& xs) {
    const auto& a = actx.aspec;
    std::size_t p = a.intervals.size();
    if (actx.measures.size() != p) throw ConfigError("rate_angelesco: one component measure per interval required");
    if (xs.size() != p) throw ConfigError("rate_angelesco: one coordinate per component required");
    for (std::size_t i = 0; i < p; ++i) {
        // grid edges are recomputed from nodes and may miss by rounding
        double slack = 1e-12 * std::max(1.0, std::fabs(xs[i]));
        const auto& g = a.intervals[i];
        if (!(xs[i] >= support_right_edge(actx.measures[i]) - slack) || xs[i] < g.lo - slack || xs[i] > g.hi + slack)
            return kInf;
    }
    double v = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        double r = a.ratios[i];
        v += -2.0 * r * r * log_potential(actx.measures[i], xs[i]) + r * a.potentials[i](xs[i]);
    }
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            double rr = a.ratios[i] * a.ratios[j];
            if (actx.symmetrized)
                v -= 0.5 * rr * (log_potential(actx.measures[j], xs[i]) + log_potential(actx.measures[i], xs[j]));
            else
                v -= rr * log_potential(actx.measures[j], xs[i]);
        }
    return v;
}

} // namespace

double rate_angelesco(const AngelescoContext& actx, const std::vector<double>& xs) {
    double v = angelesco_body(actx, xs);
    return std::isinf(v) ? v : v - actx.zeta_a;
}

double angelesco_edge_zeta(const AngelescoContext& actx) {
    std::vector<double> edges;
    for (const auto& m : actx.measures) edges.push_back(support_right_edge(m));
    return angelesco_body(actx, edges);
}

RateCurve rate_curve(const RateContext& ctx, double lo, double hi, int points) {
    if (points < 2 || !(hi > lo)) throw ConfigError("rate_curve: need points >= 2 and hi > lo");
    RateCurve c;
    for (int k = 0; k < points; ++k) {
        double x = lo + (hi - lo) * k / (points - 1);
        c.x.push_back(x);
        c.value.push_back(rate_general(ctx, x));
    }
    return c;
}

void write_rate_csv(const RateCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "x,rate\n";
    for (std::size_t i = 0; i < curve.x.size(); ++i) out << fmt(curve.x[i]) << ',' << fmt(curve.value[i]) << '\n';
}

} // namespace ldp
