#pragma once

#include "ldp/ensemble.hpp"
#include "ldp/measure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ldp {

struct RateContext {
    EnsembleSpec spec;
    SpectralMeasure mu_w;
    double b_w;
    double xi;
    double zeta;
};

// Limit of (1/n) log(Z'/Z_n) with the reduced system of p(n)-1 points and weight
// w_n^{n-1}; the value that puts the zero of the rate function at b_w.
double xi_limit(const EnsembleSpec& spec);

// Closed-form mu_w when one is known.
std::optional<SpectralMeasure> limiting_measure(const EnsembleSpec& spec);

// kappa int log w dmu + xi
double zeta(const EnsembleSpec& spec, const SpectralMeasure& mu, double xi);

// Closed-form mu_w with xi_limit; UnsupportedError for families without one.
RateContext make_rate_context(const EnsembleSpec& spec);
// Any supplied limiting measure and xi.
RateContext make_rate_context(const EnsembleSpec& spec, SpectralMeasure mu_w, double xi);

// +inf for x < b_w; dispatches on the density form.
double rate_general(const RateContext& ctx, double x);
// -kappa beta int log|x^theta - y^theta| dmu - log w(x) - zeta
double rate_beta_theta(const RateContext& ctx, double x);
// -kappa int [log|x-y| + log|x^theta-y^theta|] dmu - log w(x) - zeta
double rate_biorthogonal(const RateContext& ctx, double x);

double rate_goe(double x);
double rate_bdg_closed(double psi, double sigma2, double beta, double kappa, double x);
double rate_chiral(double beta, double sigma2, double kappa, double x);
double rate_bosonic(double x);

// Phi(t, mu) = int kernel dmu + log w(t) / kappa + int log w dmu, kernel per density form.
double phi_limit(const EnsembleSpec& spec, const SpectralMeasure& mu, double t);
// Finite-n versions with w_n = exp(log_weight / n).
double phi_n(const EnsembleSpec& spec, int n, const SpectralMeasure& mu, double t);
double phi_tilde_n(const EnsembleSpec& spec, int n, const SpectralMeasure& mu, double t);

struct AngelescoContext {
    AngelescoSpec aspec;
    std::vector<SpectralMeasure> measures;
    double zeta_a = 0.0;
    bool symmetrized = false;  // cross term 1/2 (mu_j at x_i + mu_i at x_j)
};

// Right end of the numerical support: last grid cell with weight above `cut`.
double support_right_edge(const SpectralMeasure& mu, double cut = 1e-10);

double rate_angelesco(const AngelescoContext& actx, const std::vector<double>& xs);
// zeta_a that makes the rate vanish with every x_i at its component's right edge.
double angelesco_edge_zeta(const AngelescoContext& actx);

struct RateCurve {
    std::vector<double> x;
    std::vector<double> value;
};

RateCurve rate_curve(const RateContext& ctx, double lo, double hi, int points);
void write_rate_csv(const RateCurve& curve, const std::string& path);

} // namespace ldp
