#include "ldp/ensemble.hpp"

#include "ldp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ldp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// a * log x with the convention x^0 = 1 at x = 0.
double power_log(double a, double x) {
    if (a == 0.0) return 0.0;
    if (x == 0.0) return a > 0 ? -kInf : kInf;
    return a * std::log(x);
}

double log_abs(double v) { return v == 0.0 ? -kInf : std::log(std::fabs(v)); }

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

} // namespace

double TauRule::value(int n) const { return per_n ? scale() * n : scale(); }

int LaguerreBi::l_at(int n) const { return l + int(std::floor(l_slope * n)); }

BdGParams bdg_params(BdGClass cls) {
    switch (cls) {
    case BdGClass::B: return {2.0, 2.0, 2.0};
    case BdGClass::D: return {0.0, 2.0, 2.0};
    case BdGClass::C: return {2.0, 2.0, 4.0};
    case BdGClass::CI: return {1.0, 1.0, 4.0};
    }
    throw ConfigError("unknown BdG class");
}

double chiral_beta(ChiralClass cls) {
    switch (cls) {
    case ChiralClass::BDI: return 1.0;
    case ChiralClass::AIII: return 2.0;
    case ChiralClass::CII: return 4.0;
    }
    throw ConfigError("unknown chiral class");
}

double GridCustom::eval(double t) const {
    if (x.empty() || t < x.front() || t > x.back()) return -kInf;
    auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.end()) return log_w.back();
    std::size_t i = std::size_t(it - x.begin());
    if (i == 0) return log_w.front();
    double s = (t - x[i - 1]) / (x[i] - x[i - 1]);
    return (1 - s) * log_w[i - 1] + s * log_w[i];
}

int EnsembleSpec::p(int n) const {
    if (std::holds_alternative<Chiral>(weight)) return std::max(1, int(std::lround(kappa * n)));
    return int(std::lround(kappa * n));
}

bool EnsembleSpec::in_support(double x) const {
    return std::any_of(support.begin(), support.end(),
                       [x](const Interval& I) { return I.contains(x); });
}

double EnsembleSpec::support_lo() const {
    double lo = kInf;
    for (auto& I : support) lo = std::min(lo, I.lo);
    return lo;
}

double EnsembleSpec::support_hi() const {
    double hi = -kInf;
    for (auto& I : support) hi = std::max(hi, I.hi);
    return hi;
}

std::string EnsembleSpec::family() const {
    return std::visit(overloaded{[](const Bosonic&) { return std::string("bosonic"); },
                                 [](const LaguerreBi&) { return std::string("laguerre"); },
                                 [](const GaussianWD&) { return std::string("wigner-dyson"); },
                                 [](const BdG&) { return std::string("bdg"); },
                                 [](const Chiral&) { return std::string("chiral"); },
                                 [](const GridCustom&) { return std::string("grid"); }},
                      weight);
}

void validate(const EnsembleSpec& spec) {
    if (spec.theta < 1) throw ConfigError("theta must be >= 1");
    if (!(spec.beta > 0)) throw ConfigError("beta must be > 0");
    if (!(spec.kappa > 0)) throw ConfigError("kappa must be > 0");
    if (spec.support.empty()) throw ConfigError("empty support");
    if (spec.theta % 2 == 0 && spec.support_lo() < 0)
        throw ConfigError("even theta requires support in [0, inf)");
    if (auto* c = std::get_if<Chiral>(&spec.weight)) {
        if (spec.kappa > 0.5) throw ConfigError("chiral requires kappa <= 1/2");
        if (!(c->sigma2 > 0)) throw ConfigError("sigma2 must be > 0");
        return;
    }
    if (spec.p(1) < 1) throw ConfigError("p(1) must be >= 1");
    for (int n = 2; n <= 256; ++n)
        if (spec.p(n - 1) != spec.p(n) - 1)
            throw ConfigError("pn rule violates p(n-1) = p(n) - 1");
    if (auto* b = std::get_if<BdG>(&spec.weight); b && !(b->sigma2 > 0))
        throw ConfigError("sigma2 must be > 0");
    if (auto* g = std::get_if<GridCustom>(&spec.weight)) {
        if (g->x.size() < 2 || g->x.size() != g->log_w.size())
            throw ConfigError("grid weight needs matching x/log_w columns");
        if (!std::is_sorted(g->x.begin(), g->x.end())) throw ConfigError("grid x not sorted");
    }
}

EnsembleSpec make_bosonic(int alpha, TauRule tau) {
    if (alpha < 0) throw ConfigError("alpha must be >= 0");
    EnsembleSpec s;
    s.theta = 2;
    s.beta = 1.0;
    s.kappa = 1.0;
    s.support = {Interval{0.0, kInf}};
    s.weight = Bosonic{alpha, tau};
    s.form = DensityForm::Biorthogonal;
    validate(s);
    return s;
}

EnsembleSpec make_laguerre(int theta, int l, TauRule tau, double l_slope) {
    if (l < 0 || l_slope < 0) throw ConfigError("l must be >= 0");
    EnsembleSpec s;
    s.theta = theta;
    s.beta = 1.0;
    s.kappa = 1.0;
    s.support = {Interval{0.0, kInf}};
    s.weight = LaguerreBi{theta, l, l_slope, tau};
    s.form = DensityForm::Biorthogonal;
    validate(s);
    return s;
}

EnsembleSpec make_gaussian_wd(double beta) {
    EnsembleSpec s;
    s.theta = 1;
    s.beta = beta;
    s.kappa = 1.0;
    s.support = {Interval{}};
    s.weight = GaussianWD{beta};
    s.form = DensityForm::BetaTheta;
    validate(s);
    return s;
}

EnsembleSpec make_bdg(BdGClass cls, double sigma2) {
    EnsembleSpec s;
    s.theta = 2;
    s.beta = bdg_params(cls).beta;
    s.kappa = 1.0;
    s.support = {Interval{0.0, kInf}};
    s.weight = BdG{cls, sigma2};
    s.form = DensityForm::BetaTheta;
    validate(s);
    return s;
}

EnsembleSpec make_chiral(ChiralClass cls, double kappa, double sigma2) {
    EnsembleSpec s;
    s.theta = 2;
    s.beta = chiral_beta(cls);
    s.kappa = kappa;
    s.support = {Interval{0.0, kInf}};
    s.weight = Chiral{cls, s.beta, sigma2};
    s.form = DensityForm::BetaTheta;
    validate(s);
    return s;
}

EnsembleSpec make_grid_custom(GridCustom grid, int theta, double beta, double kappa,
                              DensityForm form) {
    EnsembleSpec s;
    s.theta = theta;
    s.beta = beta;
    s.kappa = kappa;
    if (!grid.x.empty()) s.support = {Interval{grid.x.front(), grid.x.back()}};
    s.weight = std::move(grid);
    s.form = form;
    validate(s);
    return s;
}

GridCustom load_grid_custom_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    GridCustom g;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        ls.imbue(std::locale::classic());
        double x, lw;
        std::string tok;
        if (!(ls >> x)) continue;  // header row
        if (!(ls >> tok)) throw ConfigError("bad row in " + path);
        if (tok == "-inf") lw = -kInf;
        else lw = std::stod(tok);
        g.x.push_back(x);
        g.log_w.push_back(lw);
    }
    if (g.x.size() < 2) throw ConfigError("grid weight needs at least two rows");
    return g;
}

std::pair<int, int> chiral_st(const EnsembleSpec& spec, int n) {
    int s = spec.p(n);
    return {s, n - s};
}

double log_weight(const EnsembleSpec& spec, int n, double x) {
    if (!spec.in_support(x)) throw DomainError("log_weight: x outside support");
    return std::visit(
        overloaded{
            [&](const Bosonic& w) { return power_log(w.alpha, x) - w.tau.value(n) * x; },
            [&](const LaguerreBi& w) { return power_log(w.l_at(n), x) - w.tau.value(n) * x; },
            [&](const GaussianWD& w) { return -n * w.beta * x * x / 4.0; },
            [&](const BdG& w) {
                auto p = bdg_params(w.cls);
                return power_log(p.alpha, x) - n * x * x / (p.psi * w.sigma2);
            },
            [&](const Chiral& w) {
                auto [s, t] = chiral_st(spec, n);
                double e = w.beta * (t - s) + w.beta - 1.0;
                return power_log(e, x) - n * x * x / (2.0 * w.sigma2);
            },
            [&](const GridCustom& w) {
                double v = w.eval(x);
                return v == -kInf ? v : n * v;
            }},
        spec.weight);
}

double log_weight_limit(const EnsembleSpec& spec, double x) {
    return std::visit(
        overloaded{
            [&](const Bosonic& w) { return w.tau.per_n ? -w.tau.scale() * x : 0.0; },
            [&](const LaguerreBi& w) {
                double tau = w.tau.per_n ? w.tau.scale() : 0.0;
                return power_log(w.l_slope, x) - tau * x;
            },
            [&](const GaussianWD& w) { return -w.beta * x * x / 4.0; },
            [&](const BdG& w) { return -x * x / (bdg_params(w.cls).psi * w.sigma2); },
            [&](const Chiral& w) {
                return power_log(w.beta * (1.0 - 2.0 * spec.kappa), x) - x * x / (2.0 * w.sigma2);
            },
            [&](const GridCustom& w) { return w.eval(x); }},
        spec.weight);
}

std::optional<double> known_right_edge(const EnsembleSpec& spec) {
    return std::visit(
        overloaded{
            [&](const Bosonic& w) -> std::optional<double> {
                if (!w.tau.per_n) return std::nullopt;
                return 3.0 * std::sqrt(3.0) / w.tau.scale();
            },
            [&](const LaguerreBi&) -> std::optional<double> { return std::nullopt; },
            [&](const GaussianWD&) -> std::optional<double> { return 2.0; },
            [&](const BdG& w) -> std::optional<double> {
                auto p = bdg_params(w.cls);
                return std::sqrt(2.0 * p.psi * w.sigma2 * p.beta * spec.kappa);
            },
            [&](const Chiral& w) -> std::optional<double> {
                double k = spec.kappa;
                return std::sqrt(2.0 * w.sigma2 * w.beta * (0.5 + std::sqrt(k * (1 - k))));
            },
            [&](const GridCustom&) -> std::optional<double> { return std::nullopt; }},
        spec.weight);
}

double Configuration::lambda_max() const {
    return values.empty() ? -kInf : *std::max_element(values.begin(), values.end());
}

void check_configuration(const EnsembleSpec& spec, const Configuration& config) {
    if (config.n < 1) throw DomainError("configuration: n must be >= 1");
    if (int(config.values.size()) != spec.p(config.n))
        throw DomainError("configuration: length differs from p(n)");
    for (double v : config.values)
        if (!spec.in_support(v)) throw DomainError("configuration: value outside support");
}

double pair_log(const EnsembleSpec& spec, double a, double b) {
    double th = log_abs(ipow(a, spec.theta) - ipow(b, spec.theta));
    if (spec.form == DensityForm::Biorthogonal) return log_abs(a - b) + th;
    return spec.beta * th;
}

double log_joint_density(const EnsembleSpec& spec, const Configuration& config) {
    check_configuration(spec, config);
    const auto& v = config.values;
    double total = 0.0;
    for (double x : v) {
        double lw = log_weight(spec, config.n, x);
        if (lw == -kInf) return -kInf;
        total += lw;
    }
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            double t = pair_log(spec, v[i], v[j]);
            if (t == -kInf) return -kInf;
            total += t;
        }
    return total;
}

std::vector<int> AngelescoSpec::sizes(int n) const {
    std::vector<int> out(ratios.size());
    int used = 0;
    for (std::size_t i = 0; i + 1 < ratios.size(); ++i) {
        out[i] = int(std::lround(ratios[i] * n));
        used += out[i];
    }
    if (!out.empty()) out.back() = n - used;
    return out;
}

void validate(const AngelescoSpec& a) {
    std::size_t p = a.intervals.size();
    if (p == 0) throw ConfigError("angelesco: no components");
    if (a.potentials.size() != p || a.ratios.size() != p)
        throw ConfigError("angelesco: component counts differ");
    double sum = 0;
    for (double r : a.ratios) {
        if (!(r > 0 && r <= 1)) throw ConfigError("angelesco: ratio outside (0,1]");
        sum += r;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw ConfigError("angelesco: ratios do not sum to 1");
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            const auto &I = a.intervals[i], &J = a.intervals[j];
            if (!(I.hi < J.lo || J.hi < I.lo)) throw ConfigError("angelesco: intervals overlap");
        }
}

double log_joint_density_angelesco(const AngelescoSpec& a,
                                   const std::vector<std::vector<double>>& comps, int n) {
    if (int(comps.size()) != a.p()) throw DomainError("angelesco: wrong number of components");
    for (int i = 0; i < a.p(); ++i)
        for (double x : comps[i])
            if (!a.intervals[i].contains(x)) throw DomainError("angelesco: point outside interval");
    double total = 0.0;
    for (int i = 0; i < a.p(); ++i) {
        const auto& X = comps[i];
        for (std::size_t k = 0; k < X.size(); ++k) {
            total -= n * a.potentials[i](X[k]);
            for (std::size_t l = k + 1; l < X.size(); ++l) {
                double t = log_abs(X[k] - X[l]);
                if (t == -kInf) return -kInf;
                total += 2.0 * t;
            }
        }
        for (int j = i + 1; j < a.p(); ++j)
            for (double x : X)
                for (double y : comps[j]) total += std::log(std::fabs(x - y));
    }
    return total;
}

bool lemma_bound_check(const EnsembleSpec& spec, double x, double lam, int n, double c) {
    auto edge = known_right_edge(spec);
    if (!edge) throw UnsupportedError("lemma_bound_check: right edge unknown for this family");
    if (std::fabs(x) < std::max(*edge, 1.0)) throw DomainError("lemma_bound_check: |x| too small");
    if (!spec.in_support(lam)) throw DomainError("lemma_bound_check: lam outside support");
    if (!(c >= 0) || n < 1) throw DomainError("lemma_bound_check: bad c or n");
    double lw = log_weight(spec, n, lam) / n;
    double lhs = log_abs(x - lam) + log_abs(ipow(x, spec.theta) - ipow(lam, spec.theta)) + lw;
    if (lhs == -kInf) return true;
    if (c == 0) return false;
    return lhs <= std::log(c) + (spec.theta + 1) * std::log(std::fabs(x));
}

LemmaConstant estimate_lemma_constant(const EnsembleSpec& spec, double epsilon, int n_max) {
    double q = (spec.theta + 1) * std::max(spec.kappa + epsilon, 1.0) / 2.0;
    double lo = std::max(spec.support_lo(), -1e6), hi = std::min(spec.support_hi(), 1e6);
    auto sup_log_w = [&](double lam) {
        double best = -kInf;
        for (int n = 1; n <= n_max; ++n) best = std::max(best, log_weight(spec, n, lam) / n);
        return best;
    };
    auto tail_ok = [&](double lam) {
        return sup_log_w(lam) <= -q * std::log1p(lam * lam);
    };
    // geometric scan from large |lam| inward; T is the last point where the tail bound holds
    double T = 1.0;
    std::vector<double> probe;
    for (double r = 1e6; r > 1e-3; r /= 1.05) probe.push_back(r);
    for (double r : probe) {
        bool ok = true;
        for (double s : {r, -r})
            if (s >= lo && s <= hi && !tail_ok(s)) ok = false;
        if (!ok) break;
        T = r;
    }
    double sup_w = 0.0;
    const int m = 4000;
    double a = std::max(lo, -T), b = std::min(hi, T);
    for (int i = 0; i <= m; ++i) {
        double lam = a + (b - a) * i / m;
        sup_w = std::max(sup_w, std::exp(sup_log_w(lam)));
    }
    sup_w *= 1.01;  // grid maximum slack
    double compact = sup_w * (1.0 + T) * (1.0 + std::pow(T, spec.theta));
    return {std::max(4.0, compact), T, sup_w, q};
}

GrowthReport check_growth_condition(const EnsembleSpec& spec, double epsilon,
                                    const std::vector<double>& grid, const std::vector<int>& n_set) {
    if (grid.empty()) throw DomainError("check_growth_condition: empty grid");
    GrowthReport r;
    double power = (spec.theta + 1) * (spec.kappa + epsilon);
    std::vector<double> lv;
    for (double x : grid) {
        if (!spec.in_support(x)) throw DomainError("check_growth_condition: grid point outside support");
        double best = log_weight_limit(spec, x);
        for (int n : n_set) best = std::max(best, log_weight(spec, n, x) / n);
        lv.push_back(power * std::log(std::fabs(x)) + best);
        r.x.push_back(x);
        r.value.push_back(std::exp(lv.back()));
    }
    std::size_t k = lv.size() - 1;
    while (k > 0 && lv[k - 1] > lv[k]) --k;
    bool decreasing_tail = k + 1 < lv.size();
    r.pass = decreasing_tail && lv.back() <= lv[k] + std::log(1e-3);
    r.threshold = r.pass ? r.x[k] : kInf;
    return r;
}

} // namespace ldp
