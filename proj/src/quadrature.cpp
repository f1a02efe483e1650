#include "ldp/quadrature.hpp"

#include "ldp/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace ldp {

namespace {

int power_of(Edge e) {
    switch (e) {
    case Edge::Regular: return 1;
    case Edge::Sqrt: return 2;
    case Edge::InvCubeRoot: return 3;
    }
    return 1;
}

struct Panel {
    double u, v;
    Edge left, right;
};

QuadResult panel(const std::function<double(double)>& f, const Panel& p, const QuadOptions& opt) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    int ml = power_of(p.left), mr = power_of(p.right);
    double len = p.v - p.u;
    std::function<double(double)> g;
    if (ml > 1 && mr > 1) {
        throw std::logic_error("panel with two substituted ends");
    } else if (ml > 1) {
        g = [&, ml, len](double t) {
            double tm1 = std::pow(t, ml - 1);
            return f(p.u + len * tm1 * t) * ml * len * tm1;
        };
    } else if (mr > 1) {
        g = [&, mr, len](double t) {
            double tm1 = std::pow(t, mr - 1);
            return f(p.v - len * tm1 * t) * mr * len * tm1;
        };
    } else {
        g = [&, len](double t) { return f(p.u + len * t) * len; };
    }
    double err = 0.0, l1 = 0.0;
    double val = GK::integrate(g, 0.0, 1.0, unsigned(opt.max_depth), opt.rel_tol, &err, &l1);
    return {val, err};
}

} // namespace

QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b, Edge left,
                              Edge right, std::vector<double> breaks, const QuadOptions& opt) {
    if (!(std::isfinite(a) && std::isfinite(b))) throw DomainError("integrate_interval: infinite limits");
    if (b < a) {
        QuadResult r = integrate_interval(f, b, a, right, left, std::move(breaks), opt);
        return {-r.value, r.error};
    }
    if (a == b) return {};
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double t) { return !(t > a && t < b); }),
                 breaks.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    // points with their behaviour; interior breaks are log-type singular points
    std::vector<std::pair<double, Edge>> pts;
    pts.push_back({a, left});
    for (double t : breaks) pts.push_back({t, Edge::Sqrt});
    pts.push_back({b, right});

    std::vector<Panel> panels;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto [u, eu] = pts[i];
        auto [v, ev] = pts[i + 1];
        if (eu != Edge::Regular && ev != Edge::Regular) {
            double mid = 0.5 * (u + v);
            panels.push_back({u, mid, eu, Edge::Regular});
            panels.push_back({mid, v, Edge::Regular, ev});
        } else {
            panels.push_back({u, v, eu, ev});
        }
    }
    QuadResult total;
    for (auto& p : panels) {
        QuadResult r = panel(f, p, opt);
        total.value += r.value;
        total.error += r.error;
    }
    if (!std::isfinite(total.value) || total.error > opt.accept * std::max(1.0, std::fabs(total.value)))
        throw AccuracyError("adaptive quadrature did not converge", total.value, total.error);
    return total;
}

} // namespace ldp
