#include "ldp/sampler.hpp"

#include "ldp/format.hpp"
#include "ldp/rate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

namespace ldp {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// map y back into [lo, hi] by reflection at the finite ends
double reflect(double y, double lo, double hi) {
    bool flo = std::isfinite(lo), fhi = std::isfinite(hi);
    if (flo && fhi) {
        double L = hi - lo;
        double t = std::fmod(y - lo, 2 * L);
        if (t < 0) t += 2 * L;
        if (t > L) t = 2 * L - t;
        return lo + t;
    }
    if (flo && y < lo) return 2 * lo - y;
    if (fhi && y > hi) return 2 * hi - y;
    return y;
}

template <class F>
void parallel_for(long count, int threads, F&& body) {
    if (threads <= 1 || count <= 1) {
        for (long k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<long> next{0};
    auto worker = [&] {
        for (long k = next++; k < count; k = next++) body(k);
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<long>(threads, count); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace

void validate(const ChainSettings& s) {
    if (s.steps < 1) throw ConfigError("chain: steps must be >= 1");
    if (s.burn_in < 0 || s.burn_in >= s.steps) throw ConfigError("chain: need 0 <= burn_in < steps");
    if (s.thinning < 1) throw ConfigError("chain: thinning must be >= 1");
    if (!(s.proposal_scale >= 0)) throw ConfigError("chain: proposal_scale must be >= 0");
}

std::uint64_t chain_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index));
}

std::vector<double> initial_configuration(const EnsembleSpec& spec, int n, const ChainSettings& s) {
    int p = spec.p(n);
    std::vector<double> x(p);
    if (auto mu = limiting_measure(spec)) {
        for (int i = 0; i < p; ++i) x[i] = mu->quantile((i + 0.5) / p);
    } else {
        for (int i = 0; i < p; ++i) x[i] = s.init_lo + (s.init_hi - s.init_lo) * (i + 0.5) / p;
    }
    return x;
}

double log_density_delta(const EnsembleSpec& spec, int n, const std::vector<double>& values,
                         std::size_t i, double y) {
    double xi = values[i];
    double lw = log_weight(spec, n, y);
    if (lw == -kInf) return -kInf;
    double d = lw - log_weight(spec, n, xi);
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (j == i) continue;
        double t = pair_log(spec, y, values[j]);
        if (t == -kInf) return -kInf;
        d += t - pair_log(spec, xi, values[j]);
    }
    return d;
}

ChainResult sample_chain(const EnsembleSpec& spec, int n, const ChainSettings& settings) {
    validate(spec);
    validate(settings);
    if (n < 1) throw DomainError("sample_chain: n must be >= 1");
    std::vector<double> x = initial_configuration(spec, n, settings);
    std::size_t p = x.size();
    if (!std::isfinite(log_joint_density(spec, {n, x})))
        throw InitializationError("sample_chain: initial configuration has zero density");

    std::mt19937_64 rng(settings.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    bool single = spec.support.size() == 1;
    double lo = spec.support_lo(), hi = spec.support_hi();
    double scale = settings.proposal_scale;
    double log_scale = scale > 0 ? std::log(scale) : 0.0;
    bool adapt = settings.adapt && scale > 0;

    ChainResult r;
    r.n = n;
    std::vector<long> acc_i(p, 0), prop_i(p, 0);
    long acc_post = 0, prop_post = 0;
    for (long step = 0; step < settings.steps; ++step) {
        std::size_t i = std::size_t(step) % p;
        double y = x[i] + scale * normal(rng);
        double u = unif(rng);
        double delta;
        if (single) {
            y = reflect(y, lo, hi);
            delta = log_density_delta(spec, n, x, i, y);
        } else {
            delta = spec.in_support(y) ? log_density_delta(spec, n, x, i, y) : -kInf;
        }
        bool accept = delta >= 0 || u < std::exp(delta);
        if (accept) x[i] = y;

        if (step < settings.burn_in) {
            if (adapt) {
                log_scale += ((accept ? 1.0 : 0.0) - 0.3) / std::pow(1.0 + double(step), 0.6);
                scale = std::exp(log_scale);
            }
            continue;
        }
        ++prop_i[i];
        ++prop_post;
        if (accept) {
            ++acc_i[i];
            ++acc_post;
        }
        if ((step - settings.burn_in + 1) % settings.thinning == 0) {
            r.retained.push_back(x);
            r.retained_step.push_back(step);
            r.lambda_max.push_back(*std::max_element(x.begin(), x.end()));
            r.acceptance_running.push_back(double(acc_post) / double(prop_post));
        }
    }
    r.acceptance = double(acc_post) / double(prop_post);
    r.coordinate_acceptance.resize(p);
    for (std::size_t i = 0; i < p; ++i)
        r.coordinate_acceptance[i] = prop_i[i] ? double(acc_i[i]) / double(prop_i[i]) : 0.0;
    r.proposal_scale = scale;
    r.autocorrelation_time = integrated_autocorrelation(r.lambda_max);
    return r;
}

EmpiricalMeasure empirical_measure(const ChainResult& r, std::size_t index, std::vector<double> edges) {
    if (r.retained.empty()) throw DomainError("empirical_measure: no retained configurations");
    if (index >= r.retained.size()) throw DomainError("empirical_measure: index out of range");
    return make_empirical(r.retained[index], std::move(edges));
}

double integrated_autocorrelation(const std::vector<double>& s) {
    std::size_t N = s.size();
    if (N < 4) return 1.0;
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= double(N);
    double c0 = 0.0;
    for (double v : s) c0 += (v - mean) * (v - mean);
    c0 /= double(N);
    if (c0 <= 0.0) return 1.0;
    double tau = 1.0;
    for (std::size_t t = 1; t < N / 2; ++t) {
        double c = 0.0;
        for (std::size_t k = 0; k + t < N; ++k) c += (s[k] - mean) * (s[k + t] - mean);
        tau += 2.0 * c / (double(N) * c0);
        if (double(t) >= 5.0 * tau) break;
    }
    return std::max(tau, 1.0);
}

void write_chain_csv(const ChainResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "step,lambda_max,acceptance\n";
    for (std::size_t k = 0; k < r.lambda_max.size(); ++k)
        out << r.retained_step[k] << ',' << fmt(r.lambda_max[k]) << ',' << fmt(r.acceptance_running[k]) << '\n';
}

int worker_threads() {
    if (const char* env = std::getenv("LDP_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

TailEstimate make_tail_estimate(double x, int n, long hits, long trials) {
    if (trials < 1 || hits < 0 || hits > trials) throw DomainError("tail estimate: need 0 <= hits <= trials");
    TailEstimate e;
    e.x = x;
    e.n = n;
    e.hits = hits;
    e.trials = trials;
    e.censored = hits == 0;
    e.lower_bound = std::log(double(trials)) / n;
    e.neg_log_rate = e.censored ? kInf : -std::log(double(hits) / double(trials)) / n;
    const double z = 1.959963984540054;
    double t = double(trials), ph = double(hits) / t;
    double denom = 1 + z * z / t;
    double centre = (ph + z * z / (2 * t)) / denom;
    double half = z * std::sqrt(ph * (1 - ph) / t + z * z / (4 * t * t)) / denom;
    e.wilson_lo = hits == 0 ? 0.0 : std::max(0.0, centre - half);
    e.wilson_hi = hits == trials ? 1.0 : std::min(1.0, centre + half);
    return e;
}

TailEstimate estimate_tail(const EnsembleSpec& spec, int n, double x, long trials,
                           const ChainSettings& settings, int threads) {
    if (trials < 100) throw DomainError("estimate_tail: trials must be >= 100");
    if (auto b = known_right_edge(spec); b && !(x > *b))
        throw DomainError("estimate_tail: x must exceed the right edge b_w = " + fmt(*b));
    validate(settings);
    ChainSettings s = settings;
    s.thinning = s.steps - s.burn_in;  // retain only the final state
    std::vector<char> hit(std::size_t(trials), 0);
    std::uint64_t base = chain_seed(settings.seed, std::uint64_t(n));
    parallel_for(trials, threads > 0 ? threads : worker_threads(), [&](long k) {
        ChainSettings c = s;
        c.seed = chain_seed(base, std::uint64_t(k));
        auto r = sample_chain(spec, n, c);
        hit[std::size_t(k)] = r.lambda_max.back() >= x;
    });
    long hits = 0;
    for (char h : hit) hits += h;
    return make_tail_estimate(x, n, hits, trials);
}

ScalingReport fit_tail_scaling(std::vector<TailEstimate> points) {
    ScalingReport r;
    r.points = std::move(points);
    std::vector<double> ns, ys;
    for (const auto& e : r.points)
        if (!e.censored) {
            ns.push_back(e.n);
            ys.push_back(e.n * e.neg_log_rate);
        }
    std::size_t censored = r.points.size() - ns.size();
    if (2 * censored >= r.points.size() || ns.size() < 2)
        throw InconclusiveStudy("tail scaling: " + std::to_string(censored) + " of " +
                                    std::to_string(r.points.size()) + " points censored",
                                r);
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        mx += ns[k];
        my += ys[k];
    }
    mx /= double(ns.size());
    my /= double(ns.size());
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        sxx += (ns[k] - mx) * (ns[k] - mx);
        sxy += (ns[k] - mx) * (ys[k] - my);
    }
    if (sxx == 0) throw InconclusiveStudy("tail scaling: all uncensored points share one n", r);
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.monotone = true;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        r.residuals.push_back(ys[k] - (r.slope * ns[k] + r.intercept));
        if (k > 0 && ys[k] < ys[k - 1]) r.monotone = false;
    }
    r.no_decay = r.slope < 1e-2;
    return r;
}

ScalingReport tail_scaling_study(const EnsembleSpec& spec, double x, const std::vector<int>& n_list,
                                 long trials, const ChainSettings& settings, int threads) {
    if (n_list.size() < 3) throw DomainError("tail_scaling_study: need at least three sizes");
    if (!std::is_sorted(n_list.begin(), n_list.end()) ||
        std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
        throw DomainError("tail_scaling_study: sizes must be strictly increasing");
    std::vector<TailEstimate> pts;
    for (int n : n_list) pts.push_back(estimate_tail(spec, n, x, trials, settings, threads));
    return fit_tail_scaling(std::move(pts));
}

} // namespace ldp
