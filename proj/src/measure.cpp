#include "ldp/measure.hpp"

#include "ldp/ensemble.hpp"
#include "ldp/errors.hpp"
#include "ldp/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

namespace ldp {

namespace {

constexpr double kPi = std::numbers::pi;
const double kBosonicEdge = 3.0 * std::sqrt(3.0);

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double rho_infinity(double t) {
    const double b = kBosonicEdge;
    if (t <= 0.0 || t >= b) return 0.0;
    double r = t / b;
    double s = std::sqrt((1.0 - r) * (1.0 + r));
    double one_minus = r * r / (1.0 + s);
    return std::pow(r, -1.0 / 3.0) * (std::cbrt(1.0 + s) - std::cbrt(one_minus)) / (2.0 * kPi);
}

// average of log|x - y| over y in [lo, hi]
double cell_log_average(double x, double lo, double hi) {
    if (hi <= lo) return std::log(std::fabs(x - lo));
    auto G = [](double u) { return u == 0.0 ? 0.0 : u * std::log(std::fabs(u)) - u; };
    return (G(hi - x) - G(lo - x)) / (hi - lo);
}

double log_abs(double v) { return std::log(std::fabs(v)); }

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// log |(x^theta - y^theta) / (x - y)|
double log_remainder(double x, double y, int theta) {
    double s = 0.0;
    for (int k = 0; k < theta; ++k) s += ipow(x, k) * ipow(y, theta - 1 - k);
    return log_abs(s);
}

} // namespace

double ChiralMeasure::a() const { return 2.0 * sigma2 * beta * (0.5 - std::sqrt(kappa * (1.0 - kappa))); }
double ChiralMeasure::b() const { return 2.0 * sigma2 * beta * (0.5 + std::sqrt(kappa * (1.0 - kappa))); }

SpectralMeasure::SpectralMeasure(MeasureKind kind) : kind_(std::move(kind)) {
    std::visit(overloaded{[&](const BosonicRho& m) {
                              if (!(m.scale > 0)) throw ConfigError("bosonic rho: scale must be > 0");
                              a_ = 0.0;
                              b_ = kBosonicEdge / m.scale;
                              left_ = Edge::InvCubeRoot;
                              right_ = Edge::Sqrt;
                          },
                          [&](const BdGMeasure& m) {
                              if (!(m.psi > 0 && m.sigma2 > 0 && m.beta > 0 && m.kappa > 0))
                                  throw ConfigError("bdg measure: parameters must be > 0");
                              a_ = 0.0;
                              b_ = std::sqrt(2.0 * m.psi * m.sigma2 * m.beta * m.kappa);
                              left_ = Edge::Regular;
                              right_ = Edge::Sqrt;
                          },
                          [&](const ChiralMeasure& m) {
                              if (!(m.kappa > 0 && m.kappa <= 0.5 && m.sigma2 > 0 && m.beta > 0))
                                  throw ConfigError("chiral measure: need 0 < kappa <= 1/2");
                              a_ = std::sqrt(std::max(0.0, m.a()));
                              b_ = std::sqrt(m.b());
                              left_ = a_ > 0 ? Edge::Sqrt : Edge::Regular;
                              right_ = Edge::Sqrt;
                          },
                          [&](const Semicircle& m) {
                              if (!(m.radius > 0)) throw ConfigError("semicircle: radius must be > 0");
                              a_ = -m.radius;
                              b_ = m.radius;
                              left_ = right_ = Edge::Sqrt;
                          },
                          [&](const GridMeasure& g) {
                              if (g.nodes.empty() || g.nodes.size() != g.weights.size() ||
                                  g.edges.size() != g.nodes.size() + 1)
                                  throw ConfigError("grid measure: inconsistent sizes");
                              std::size_t lo = 0, hi = g.nodes.size();
                              while (lo < hi && g.weights[lo] <= 0) ++lo;
                              while (hi > lo && g.weights[hi - 1] <= 0) --hi;
                              if (lo == hi) throw ConfigError("grid measure: zero mass");
                              a_ = g.edges[lo];
                              b_ = g.edges[hi];
                          }},
               kind_);
    build_cache();
}

SpectralMeasure SpectralMeasure::grid(std::vector<double> nodes, std::vector<double> weights) {
    if (nodes.empty() || nodes.size() != weights.size()) throw ConfigError("grid measure: inconsistent sizes");
    if (!std::is_sorted(nodes.begin(), nodes.end())) throw ConfigError("grid measure: nodes not sorted");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0)) throw ConfigError("grid measure: negative weight");
        total += w;
    }
    if (!(total > 0)) throw ConfigError("grid measure: zero mass");
    for (double& w : weights) w /= total;
    GridMeasure g;
    std::size_t n = nodes.size();
    g.edges.resize(n + 1);
    if (n == 1) {
        g.edges[0] = g.edges[1] = nodes[0];
    } else {
        for (std::size_t i = 1; i < n; ++i) g.edges[i] = 0.5 * (nodes[i - 1] + nodes[i]);
        g.edges[0] = nodes[0] - 0.5 * (nodes[1] - nodes[0]);
        g.edges[n] = nodes[n - 1] + 0.5 * (nodes[n - 1] - nodes[n - 2]);
    }
    g.nodes = std::move(nodes);
    g.weights = std::move(weights);
    return SpectralMeasure(std::move(g));
}

std::string SpectralMeasure::name() const {
    return std::visit(overloaded{[](const BosonicRho&) { return std::string("bosonic-rho"); },
                                 [](const BdGMeasure&) { return std::string("bdg"); },
                                 [](const ChiralMeasure&) { return std::string("chiral"); },
                                 [](const Semicircle&) { return std::string("semicircle"); },
                                 [](const GridMeasure&) { return std::string("grid"); }},
                      kind_);
}

double SpectralMeasure::density_at(double y) const {
    return std::visit(
        overloaded{[&](const BosonicRho& m) { return m.scale * rho_infinity(m.scale * y); },
                   [&](const BdGMeasure& m) {
                       if (y < 0 || y >= b_) return 0.0;
                       double c = m.psi * m.sigma2 * m.beta * m.kappa;
                       return 2.0 / (c * kPi) * std::sqrt((b_ - y) * (b_ + y));
                   },
                   [&](const ChiralMeasure& m) {
                       if (y <= a_ || y >= b_) return 0.0;
                       double lo = (y - a_) * (y + a_), hi = (b_ - y) * (b_ + y);
                       return std::sqrt(lo * hi) / (m.sigma2 * m.beta * m.kappa * kPi * y);
                   },
                   [&](const Semicircle& m) {
                       if (y <= -m.radius || y >= m.radius) return 0.0;
                       return 2.0 / (kPi * m.radius * m.radius) * std::sqrt((m.radius - y) * (m.radius + y));
                   },
                   [&](const GridMeasure& g) {
                       if (y < g.edges.front() || y > g.edges.back()) return 0.0;
                       auto it = std::upper_bound(g.edges.begin(), g.edges.end(), y);
                       std::size_t i = std::min<std::size_t>(std::size_t(it - g.edges.begin()), g.nodes.size());
                       if (i == 0) return 0.0;
                       double w = g.edges[i] - g.edges[i - 1];
                       return w > 0 ? g.weights[i - 1] / w : kInf;
                   }},
        kind_);
}

void SpectralMeasure::build_cache() {
    auto c = std::make_shared<CdfCache>();
    if (auto* g = std::get_if<GridMeasure>(&kind_)) {
        c->y = g->edges;
        c->F.assign(g->edges.size(), 0.0);
        for (std::size_t i = 0; i < g->weights.size(); ++i) c->F[i + 1] = c->F[i] + g->weights[i];
    } else {
        const int K = 2048;
        c->y.resize(K + 1);
        for (int k = 0; k <= K; ++k) c->y[k] = a_ + (b_ - a_) * 0.5 * (1.0 - std::cos(kPi * k / K));
        c->y[0] = a_;
        c->y[K] = b_;
        c->F.assign(K + 1, 0.0);
        auto dens = [this](double y) { return density_at(y); };
        QuadOptions opt;
        opt.rel_tol = 1e-10;
        for (int k = 0; k < K; ++k) {
            Edge l = k == 0 ? left_ : Edge::Regular;
            Edge r = k == K - 1 ? right_ : Edge::Regular;
            c->F[k + 1] = c->F[k] + integrate_interval(dens, c->y[k], c->y[k + 1], l, r, {}, opt).value;
        }
    }
    double total = c->F.back();
    for (double& f : c->F) f /= total;
    cache_ = std::move(c);
}

double SpectralMeasure::cdf(double y) const {
    const auto& c = *cache_;
    if (y <= c.y.front()) return 0.0;
    if (y >= c.y.back()) return 1.0;
    auto it = std::upper_bound(c.y.begin(), c.y.end(), y);
    std::size_t i = std::size_t(it - c.y.begin());
    double w = c.y[i] - c.y[i - 1];
    double s = w > 0 ? (y - c.y[i - 1]) / w : 1.0;
    return c.F[i - 1] + s * (c.F[i] - c.F[i - 1]);
}

double SpectralMeasure::quantile(double u) const {
    const auto& c = *cache_;
    if (u <= 0) return c.y.front();
    if (u >= 1) return c.y.back();
    auto it = std::lower_bound(c.F.begin(), c.F.end(), u);
    std::size_t i = std::max<std::size_t>(1, std::size_t(it - c.F.begin()));
    double dF = c.F[i] - c.F[i - 1];
    double s = dF > 0 ? (u - c.F[i - 1]) / dF : 0.0;
    return c.y[i - 1] + s * (c.y[i] - c.y[i - 1]);
}

double integrate(const SpectralMeasure& mu, const std::function<double(double)>& f,
                 const std::vector<double>& singular, const QuadOptions& opt) {
    if (mu.is_grid()) {
        const auto& g = mu.as_grid();
        double s = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
            if (g.weights[i] > 0) s += g.weights[i] * f(g.nodes[i]);
        return s;
    }
    auto h = [&](double y) {
        double d = mu.density_at(y);
        return d == 0.0 ? 0.0 : f(y) * d;
    };
    // a declared point at an endpoint upgrades a regular edge to the log-capable substitution
    Edge left = mu.left_edge(), right = mu.right_edge();
    for (double s : singular) {
        if (s == mu.a_w() && left == Edge::Regular) left = Edge::Sqrt;
        if (s == mu.b_w() && right == Edge::Regular) right = Edge::Sqrt;
    }
    return integrate_interval(h, mu.a_w(), mu.b_w(), left, right, singular, opt).value;
}

double log_potential(const SpectralMeasure& mu, double x) {
    if (mu.is_grid()) {
        const auto& g = mu.as_grid();
        double s = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
            if (g.weights[i] > 0) s += g.weights[i] * cell_log_average(x, g.edges[i], g.edges[i + 1]);
        return s;
    }
    return integrate(mu, [x](double y) { return log_abs(x - y); }, {x});
}

double log_potential_power(const SpectralMeasure& mu, double x, int theta) {
    if (theta < 1) throw DomainError("log_potential_power: theta must be >= 1");
    double base = log_potential(mu, x);
    if (theta == 1) return base;
    auto rem = [x, theta](double y) { return log_remainder(x, y, theta); };
    std::vector<double> singular;
    if (theta % 2 == 0) singular.push_back(-x);
    if (mu.is_grid()) return base + integrate(mu, rem);
    return base + integrate(mu, rem, singular);
}

double integrate_log_kernel(const SpectralMeasure& mu, double x, int theta) {
    if (x > mu.a_w() && x < mu.b_w()) throw DomainError("integrate_log_kernel: x inside the support");
    return log_potential(mu, x) + log_potential_power(mu, x, theta);
}

EmpiricalMeasure make_empirical(std::vector<double> values, std::vector<double> edges) {
    if (values.empty()) throw DomainError("empirical measure: empty sample");
    std::sort(values.begin(), values.end());
    EmpiricalMeasure e;
    e.samples = std::move(values);
    if (edges.empty()) return e;
    if (!std::is_sorted(edges.begin(), edges.end()) || edges.size() < 2)
        throw DomainError("empirical measure: bad bin edges");
    e.edges = std::move(edges);
    e.counts.assign(e.edges.size() - 1, 0);
    for (double v : e.samples) {
        if (v < e.edges.front() || v > e.edges.back()) continue;
        auto it = std::upper_bound(e.edges.begin(), e.edges.end(), v);
        std::size_t i = std::min<std::size_t>(std::size_t(it - e.edges.begin()) - 1, e.counts.size() - 1);
        ++e.counts[i];
    }
    return e;
}

EmpiricalMeasure make_empirical(std::vector<double> values, int bins) {
    if (values.empty()) throw DomainError("empirical measure: empty sample");
    if (bins < 1) throw DomainError("empirical measure: bins must be >= 1");
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    double a = *lo, b = *hi;
    if (b == a) b = a + 1.0;
    std::vector<double> edges(bins + 1);
    for (int k = 0; k <= bins; ++k) edges[k] = a + (b - a) * k / bins;
    return make_empirical(std::move(values), std::move(edges));
}

double ks_distance(const EmpiricalMeasure& emp, const SpectralMeasure& mu) {
    if (emp.samples.empty()) throw DomainError("ks_distance: empty sample");
    double m = double(emp.samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < emp.samples.size(); ++i) {
        double F = mu.cdf(emp.samples[i]);
        d = std::max({d, F - i / m, (i + 1) / m - F});
    }
    return std::min(d, 1.0);
}

double l1_distance(const SpectralMeasure& grid, const SpectralMeasure& mu) {
    const auto& g = grid.as_grid();
    double s = mu.cdf(g.edges.front()) + (1.0 - mu.cdf(g.edges.back()));
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        s += std::fabs(g.weights[i] - (mu.cdf(g.edges[i + 1]) - mu.cdf(g.edges[i])));
    return s;
}

void write_grid_csv(const SpectralMeasure& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    const auto& g = grid.as_grid();
    out << "node,weight\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) out << fmt(g.nodes[i]) << ',' << fmt(g.weights[i]) << '\n';
}

void write_cdf_csv(const SpectralMeasure& mu, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    const auto& c = mu.cdf_cache();
    out << "node,cdf\n";
    for (std::size_t i = 0; i < c.y.size(); ++i) out << fmt(c.y[i]) << ',' << fmt(c.F[i]) << '\n';
}

void write_density_csv(const SpectralMeasure& mu, const std::string& path, int points) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "y,density\n";
    for (int k = 0; k <= points; ++k) {
        double y = mu.a_w() + (mu.b_w() - mu.a_w()) * k / points;
        out << fmt(y) << ',' << fmt(mu.density_at(y)) << '\n';
    }
}

} // namespace ldp
