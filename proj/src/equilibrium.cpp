#include "ldp/equilibrium.hpp"

#include "ldp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

namespace ldp {

namespace {

std::vector<double> cell_edges(const std::vector<double>& x) {
    std::size_t n = x.size();
    std::vector<double> e(n + 1);
    if (n == 1) {
        e[0] = x[0] - 0.5;
        e[1] = x[0] + 0.5;
        return e;
    }
    for (std::size_t i = 1; i < n; ++i) e[i] = 0.5 * (x[i - 1] + x[i]);
    e[0] = x[0] - 0.5 * (x[1] - x[0]);
    e[n] = x[n - 1] + 0.5 * (x[n - 1] - x[n - 2]);
    return e;
}

// antiderivative of log|t|
double g_real(double t) { return t == 0.0 ? 0.0 : t * std::log(std::fabs(t)) - t; }

// antiderivative of (1/2) log(t^2 + v^2), v != 0
double g_complex(double t, double v) {
    return 0.5 * (t * std::log(t * t + v * v) - 2 * t) + v * std::atan(t / v);
}

// average over y in [a, b] of log|y - r|
double avg_log(std::complex<double> r, double a, double b) {
    double v = r.imag();
    if (std::fabs(v) < 1e-300) return (g_real(b - r.real()) - g_real(a - r.real())) / (b - a);
    return (g_complex(b - r.real(), v) - g_complex(a - r.real(), v)) / (b - a);
}

struct KernelWeights {
    double linear;  // coefficient of log|x-y|
    double rest;    // coefficient of the remaining factors of log|x^theta-y^theta|
};

// L_ij = linear avg log|x_i - y| + rest sum_{k>=1} avg log|y - x_i w^k| over cell j
std::vector<double> kernel_matrix(const std::vector<double>& xr, const std::vector<double>& xc,
                                  int theta, KernelWeights kw) {
    auto edges = cell_edges(xc);
    std::vector<std::complex<double>> roots;
    for (int k = 1; k < theta; ++k)
        roots.push_back(std::polar(1.0, 2 * std::numbers::pi * k / theta));
    std::vector<double> L(xr.size() * xc.size());
    for (std::size_t i = 0; i < xr.size(); ++i)
        for (std::size_t j = 0; j < xc.size(); ++j) {
            double a = edges[j], b = edges[j + 1];
            double v = kw.linear * avg_log({xr[i], 0.0}, a, b);
            for (auto w : roots) {
                auto r = xr[i] * w;
                if (std::fabs(r.imag()) < 1e-14 * std::max(1.0, std::fabs(xr[i]))) r.imag(0.0);
                v += kw.rest * avg_log(r, a, b);
            }
            L[i * xc.size() + j] = v;
        }
    return L;
}

// minimize f(z) = -1/2 z'Mz + b'z over a product of simplices; entries with
// active = false stay at zero.
struct BlockQP {
    std::size_t dim = 0;
    std::vector<double> M;  // symmetric, dim x dim
    std::vector<double> b;
    std::vector<std::size_t> block_start;  // size blocks + 1
    std::vector<char> active;
};

struct QPSolution {
    std::vector<double> z;
    std::vector<double> grad;
    double value = 0.0;
    int iterations = 0;
    std::vector<double> history;
};

void matvec(const BlockQP& qp, const std::vector<double>& z, std::vector<double>& out) {
    std::size_t n = qp.dim;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = qp.M.data() + i * n;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * z[j];
        out[i] = s;
    }
}

double objective(const BlockQP& qp, const std::vector<double>& z, const std::vector<double>& Mz) {
    double v = 0.0;
    for (std::size_t i = 0; i < qp.dim; ++i)
        if (z[i] != 0.0) v += z[i] * (qp.b[i] - 0.5 * Mz[i]);
    return v;
}

void project(const BlockQP& qp, std::vector<double>& z) {
    std::vector<double> tmp;
    std::vector<std::size_t> idx;
    for (std::size_t blk = 0; blk + 1 < qp.block_start.size(); ++blk) {
        tmp.clear();
        idx.clear();
        for (std::size_t i = qp.block_start[blk]; i < qp.block_start[blk + 1]; ++i) {
            if (qp.active[i]) {
                idx.push_back(i);
                tmp.push_back(z[i]);
            } else {
                z[i] = 0.0;
            }
        }
        project_simplex(tmp);
        for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = tmp[k];
    }
}

// Frank-Wolfe gap sum_blocks [z'g - min_active g]
double fw_gap(const BlockQP& qp, const std::vector<double>& z, const std::vector<double>& g) {
    double gap = 0.0;
    for (std::size_t blk = 0; blk + 1 < qp.block_start.size(); ++blk) {
        double zg = 0.0, gmin = kInf;
        for (std::size_t i = qp.block_start[blk]; i < qp.block_start[blk + 1]; ++i) {
            if (!qp.active[i]) continue;
            zg += z[i] * g[i];
            gmin = std::min(gmin, g[i]);
        }
        gap += zg - gmin;
    }
    return gap;
}

QPSolution solve_qp(const BlockQP& qp, std::vector<double> z0, const EquilibriumOptions& opt) {
    std::size_t n = qp.dim;
    auto grad_of = [&](const std::vector<double>& Mz, std::vector<double>& g) {
        for (std::size_t i = 0; i < n; ++i) g[i] = qp.b[i] - Mz[i];
    };

    std::vector<double> z = std::move(z0);
    project(qp, z);
    std::vector<double> Mz(n), z_prev = z, Mz_prev(n), y(n), My(n), gy(n), cand(n), Mc(n), g(n);
    matvec(qp, z, Mz);
    Mz_prev = Mz;
    double fz = objective(qp, z, Mz);

    QPSolution out;
    out.history.push_back(fz);
    double t = 1.0, step = 1.0;
    int quiet = 0;
    bool converged = false;
    for (int it = 1; it <= opt.max_iter; ++it) {
        double t_next = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
        double mom = (t - 1) / t_next;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = z[i] + mom * (z[i] - z_prev[i]);
            My[i] = Mz[i] + mom * (Mz[i] - Mz_prev[i]);
        }
        grad_of(My, gy);
        double fy = objective(qp, y, My);

        double fc = 0.0;
        step *= 2.0;
        for (int bt = 0; bt < 80; ++bt) {
            for (std::size_t i = 0; i < n; ++i) cand[i] = y[i] - step * gy[i];
            project(qp, cand);
            matvec(qp, cand, Mc);
            fc = objective(qp, cand, Mc);
            double lin = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d = cand[i] - y[i];
                lin += gy[i] * d;
                sq += d * d;
            }
            if (fc <= fy + lin + sq / (2 * step) + 1e-15 * std::fabs(fy)) break;
            step *= 0.5;
        }

        if (fc > fz) {
            // a plain projected step that cannot decrease f means stationarity to rounding
            if (mom == 0.0) {
                converged = true;
                break;
            }
            // function-value restart: drop momentum and retry from z
            t = 1.0;
            z_prev = z;
            Mz_prev = Mz;
            continue;
        }
        double decrease = fz - fc;
        z_prev.swap(z);
        Mz_prev.swap(Mz);
        z = cand;
        Mz = Mc;
        fz = fc;
        t = t_next;
        out.history.push_back(fz);
        out.iterations = it;

        if (decrease < opt.tol) {
            grad_of(Mz, g);
            if (fw_gap(qp, z, g) < opt.gap_tol && ++quiet >= 3) {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if (!converged)
        throw EquilibriumNotConverged("equilibrium solver: no convergence after " +
                                          std::to_string(opt.max_iter) + " iterations",
                                      z, out.history);
    grad_of(Mz, g);
    out.z = std::move(z);
    out.grad = std::move(g);
    out.value = fz;
    return out;
}

void kkt_report(const BlockQP& qp, const QPSolution& s, double cut, double& flat, double& gap) {
    flat = 0.0;
    gap = kInf;
    for (std::size_t blk = 0; blk + 1 < qp.block_start.size(); ++blk) {
        double lo = kInf, hi = -kInf, off = kInf;
        for (std::size_t i = qp.block_start[blk]; i < qp.block_start[blk + 1]; ++i) {
            if (!qp.active[i]) continue;
            if (s.z[i] > cut) {
                lo = std::min(lo, s.grad[i]);
                hi = std::max(hi, s.grad[i]);
            } else {
                off = std::min(off, s.grad[i]);
            }
        }
        flat = std::max(flat, hi - lo);
        gap = std::min(gap, off - hi);
    }
}

void check_nodes(const std::vector<double>& nodes) {
    if (nodes.size() < 2) throw ConfigError("equilibrium: need at least two nodes");
    if (!std::is_sorted(nodes.begin(), nodes.end()) ||
        std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
        throw ConfigError("equilibrium: nodes must be strictly increasing");
}

} // namespace

void project_simplex(std::vector<double>& v) {
    if (v.empty()) return;
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, shift = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cum += u[k];
        double s = (cum - 1.0) / double(k + 1);
        if (u[k] - s > 0) shift = s;
    }
    for (double& x : v) x = std::max(x - shift, 0.0);
}

std::vector<double> uniform_nodes(double lo, double hi, int count) {
    if (count < 1 || !(hi > lo)) throw ConfigError("uniform_nodes: need count >= 1 and hi > lo");
    std::vector<double> x(count);
    double h = (hi - lo) / count;
    for (int i = 0; i < count; ++i) x[i] = lo + (i + 0.5) * h;
    return x;
}

EquilibriumResult solve_equilibrium(const EnsembleSpec& spec, const std::vector<double>& nodes,
                                    const EquilibriumOptions& opt) {
    validate(spec);
    check_nodes(nodes);
    std::size_t n = nodes.size();
    double be = spec.beta_eff();
    KernelWeights kw = spec.form == DensityForm::Biorthogonal ? KernelWeights{2.0, 1.0}
                                                              : KernelWeights{be, be};

    BlockQP qp;
    qp.dim = n;
    qp.M = kernel_matrix(nodes, nodes, spec.theta, kw);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.5 * spec.kappa * (qp.M[i * n + j] + qp.M[j * n + i]);
            qp.M[i * n + j] = qp.M[j * n + i] = s;
        }
    for (std::size_t i = 0; i < n; ++i) qp.M[i * n + i] *= spec.kappa;
    qp.b.assign(n, 0.0);
    qp.active.assign(n, 0);
    qp.block_start = {0, n};
    std::size_t live = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!spec.in_support(nodes[i])) continue;
        double lw = log_weight_limit(spec, nodes[i]);
        if (!std::isfinite(lw)) continue;
        qp.b[i] = -lw;
        qp.active[i] = 1;
        ++live;
    }
    if (live == 0) throw DomainError("equilibrium: no grid node inside the support");

    std::vector<double> z0(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (qp.active[i]) z0[i] = 1.0 / double(live);
    auto sol = solve_qp(qp, std::move(z0), opt);

    EquilibriumResult r;
    r.measure = SpectralMeasure::grid(nodes, sol.z);
    r.energy = sol.value;
    r.iterations = sol.iterations;
    kkt_report(qp, sol, opt.support_cut, r.flatness, r.off_support_gap);
    r.history = std::move(sol.history);
    return r;
}

AngelescoEquilibrium solve_angelesco(const AngelescoSpec& aspec,
                                     const std::vector<std::vector<double>>& nodes,
                                     const EquilibriumOptions& opt) {
    validate(aspec);
    std::size_t p = aspec.intervals.size();
    if (nodes.size() != p) throw ConfigError("angelesco: one node set per component required");
    BlockQP qp;
    qp.block_start = {0};
    for (const auto& x : nodes) {
        check_nodes(x);
        qp.block_start.push_back(qp.block_start.back() + x.size());
    }
    std::size_t n = qp.block_start.back();
    qp.dim = n;
    qp.M.assign(n * n, 0.0);
    qp.b.assign(n, 0.0);
    qp.active.assign(n, 0);
    for (std::size_t bi = 0; bi < p; ++bi)
        for (std::size_t bj = bi; bj < p; ++bj) {
            auto L = kernel_matrix(nodes[bi], nodes[bj], 1, {1.0, 0.0});
            double ri = aspec.ratios[bi], rj = aspec.ratios[bj];
            double c = bi == bj ? 2 * ri * ri : ri * rj;
            std::size_t ni = nodes[bi].size(), nj = nodes[bj].size();
            for (std::size_t i = 0; i < ni; ++i)
                for (std::size_t j = 0; j < nj; ++j) {
                    double v = c * L[i * nj + j];
                    std::size_t gi = qp.block_start[bi] + i, gj = qp.block_start[bj] + j;
                    if (bi == bj) {
                        qp.M[gi * n + gj] += 0.5 * v;
                        qp.M[gj * n + gi] += 0.5 * v;
                    } else {
                        qp.M[gi * n + gj] = v;
                        qp.M[gj * n + gi] = v;
                    }
                }
        }

    std::vector<double> z0(n, 0.0);
    for (std::size_t bi = 0; bi < p; ++bi) {
        std::size_t live = 0;
        for (std::size_t i = 0; i < nodes[bi].size(); ++i) {
            double x = nodes[bi][i];
            if (!aspec.intervals[bi].contains(x)) continue;
            double v = aspec.potentials[bi](x);
            if (!std::isfinite(v)) continue;
            std::size_t g = qp.block_start[bi] + i;
            qp.b[g] = aspec.ratios[bi] * v;
            qp.active[g] = 1;
            ++live;
        }
        if (live == 0) throw DomainError("angelesco: component " + std::to_string(bi) + " has no node in its interval");
        for (std::size_t i = qp.block_start[bi]; i < qp.block_start[bi + 1]; ++i)
            if (qp.active[i]) z0[i] = 1.0 / double(live);
    }
    auto sol = solve_qp(qp, std::move(z0), opt);

    AngelescoEquilibrium r;
    for (std::size_t bi = 0; bi < p; ++bi) {
        std::vector<double> w(sol.z.begin() + long(qp.block_start[bi]),
                              sol.z.begin() + long(qp.block_start[bi + 1]));
        r.measures.push_back(SpectralMeasure::grid(nodes[bi], std::move(w)));
    }
    r.energy = sol.value;
    r.iterations = sol.iterations;
    kkt_report(qp, sol, opt.support_cut, r.flatness, r.off_support_gap);
    r.history = std::move(sol.history);
    return r;
}

} // namespace ldp
