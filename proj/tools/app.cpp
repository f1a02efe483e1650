#include "app.hpp"

#include "ldp/equilibrium.hpp"
#include "ldp/errors.hpp"
#include "ldp/exact.hpp"
#include "ldp/format.hpp"
#include "ldp/partition.hpp"
#include "ldp/rate.hpp"
#include "ldp/sampler.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ldp::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

long parse_long(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("cannot parse " + what + " '" + s + "'");
    return v;
}

// finite values as numbers, +-inf and nan as strings
json num(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v);
}

std::string path_in(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
}

template <class T>
T get(const json& p, const char* key) {
    if (!p.contains(key) || p.at(key).is_null()) throw ConfigError(std::string("missing parameter '") + key + "'");
    return p.at(key).get<T>();
}

BdGClass bdg_class(const std::string& s) {
    if (s == "B") return BdGClass::B;
    if (s == "D") return BdGClass::D;
    if (s == "C") return BdGClass::C;
    if (s == "CI") return BdGClass::CI;
    throw ConfigError("unknown BdG class '" + s + "' (B, D, C, CI)");
}

ChiralClass chiral_class(const std::string& s) {
    if (s == "BDI") return ChiralClass::BDI;
    if (s == "AIII") return ChiralClass::AIII;
    if (s == "CII") return ChiralClass::CII;
    throw ConfigError("unknown chiral class '" + s + "' (BDI, AIII, CII)");
}

// closed-form rate for the named ensembles that have one
std::function<double(double)> closed_rate(const EnsembleSpec& spec) {
    if (auto* w = std::get_if<GaussianWD>(&spec.weight)) {
        double beta = w->beta;
        return [beta](double x) { return beta * rate_goe(x); };
    }
    if (auto* w = std::get_if<BdG>(&spec.weight)) {
        auto bp = bdg_params(w->cls);
        double s2 = w->sigma2, k = spec.kappa;
        return [bp, s2, k](double x) { return rate_bdg_closed(bp.psi, s2, bp.beta, k, x); };
    }
    if (auto* w = std::get_if<Chiral>(&spec.weight)) {
        double beta = w->beta, s2 = w->sigma2, k = spec.kappa;
        return [beta, s2, k](double x) { return rate_chiral(beta, s2, k, x); };
    }
    if (auto* w = std::get_if<Bosonic>(&spec.weight)) {
        if (w->tau.per_n && w->tau.scale() == 1.0 && spec.kappa == 1.0) return rate_bosonic;
    }
    return {};
}

std::function<double(double)> rate_evaluator(const EnsembleSpec& spec, const std::string& method) {
    if (method != "auto" && method != "closed" && method != "quadrature")
        throw ConfigError("rate method must be auto, closed or quadrature");
    if (method != "quadrature") {
        if (auto f = closed_rate(spec)) return f;
        if (method == "closed") throw UnsupportedError("no closed-form rate for " + spec.family());
    }
    auto ctx = std::make_shared<RateContext>(make_rate_context(spec));
    return [ctx](double x) { return rate_general(*ctx, x); };
}

std::pair<double, double> solve_range(const EnsembleSpec& spec, const json& p) {
    double lo = p.value("lo", NAN), hi = p.value("hi", NAN);
    if (std::isnan(lo) || std::isnan(hi)) {
        auto mu = limiting_measure(spec);
        if (!mu) throw ConfigError("equilibrium: --lo and --hi are required for " + spec.family());
        double pad = 0.2 * (mu->b_w() - mu->a_w());
        if (std::isnan(lo)) lo = std::max(spec.support_lo(), mu->a_w() - pad);
        if (std::isnan(hi)) hi = std::min(spec.support_hi(), mu->b_w() + pad);
    }
    if (!(hi > lo)) throw ConfigError("equilibrium: need lo < hi");
    return {lo, hi};
}

ChainSettings chain_settings(const json& p) {
    ChainSettings s;
    s.steps = p.value("steps", s.steps);
    s.burn_in = p.value("burn_in", s.burn_in);
    s.thinning = p.value("thinning", s.thinning);
    s.seed = get<std::uint64_t>(p, "seed");
    s.proposal_scale = p.value("proposal_scale", s.proposal_scale);
    s.adapt = p.value("adapt", s.adapt);
    s.init_lo = p.value("init_lo", s.init_lo);
    s.init_hi = p.value("init_hi", s.init_hi);
    return s;
}

json tail_json(const TailEstimate& e, std::uint64_t base_seed) {
    return {{"n", e.n},
            {"x", e.x},
            {"hits", e.hits},
            {"trials", e.trials},
            {"base_seed", base_seed},
            {"neg_log_rate", num(e.neg_log_rate)},
            {"lower_bound", e.lower_bound},
            {"wilson", {e.wilson_lo, e.wilson_hi}},
            {"censored", e.censored}};
}

CommandResult cmd_partition(const json& p, const std::string& dir, std::ostream& out) {
    auto spec = build_ensemble(p);
    int n = get<int>(p, "n");
    bool exact = p.value("exact", false), closed = p.value("closed", false);
    if (!exact && !closed) exact = closed = true;
    json j{{"n", n}};
    if (exact) {
        auto z = partition_exact(spec, n);
        auto frac = to_fraction_string(z);
        j["exact"] = {{"numerator", boost::multiprecision::numerator(z).str()},
                      {"denominator", boost::multiprecision::denominator(z).str()}};
        out << (closed ? "exact " : "") << frac << '\n';
    }
    if (closed) {
        double lz = partition_closed_form(spec, n);
        j["log_closed_form"] = num(lz);
        out << (exact ? "log_closed_form " : "") << fmt(lz) << '\n';
    }
    write_json(j, path_in(dir, "partition.json"));
    return {{"partition.json"}, 0};
}

CommandResult cmd_xi(const json& p, const std::string& dir, std::ostream& out) {
    auto spec = build_ensemble(p);
    int n_max = get<int>(p, "n_max");
    int n_min = p.value("n_min", 10);
    if (n_min < 2 || n_max < n_min) throw ConfigError("xi: need 2 <= n_min <= n_max");
    std::string cs = p.value("convention", std::string("native"));
    XiConvention conv;
    if (cs == "native") conv = native_convention(spec);
    else if (cs == "proof") conv = XiConvention::Proof;
    else if (cs == "same-weight") conv = XiConvention::SameWeight;
    else throw ConfigError("xi: convention must be native, proof or same-weight");
    std::string asym;
    try {
        asym = fmt(xi_asymptotic(spec));
    } catch (const UnsupportedError&) {
        asym = "nan";
    }
    std::vector<int> ns;
    for (long n = n_min; n < n_max; n *= 2) ns.push_back(int(n));
    ns.push_back(n_max);
    std::ostringstream csv;
    csv << "n,xi_empirical,xi_asymptotic\n";
    for (int n : ns) csv << n << ',' << fmt(xi_empirical(spec, n, conv)) << ',' << asym << '\n';
    out << csv.str();
    std::ofstream f(path_in(dir, "xi.csv"));
    f << csv.str();
    return {{"xi.csv"}, 0};
}

CommandResult cmd_equilibrium(const json& p, const std::string& dir, std::ostream& out) {
    auto spec = build_ensemble(p);
    std::string mode = p.value("mode", std::string("solve"));
    if (mode == "closed") {
        auto mu = limiting_measure(spec);
        if (!mu) throw UnsupportedError("equilibrium: no closed-form limiting measure for " + spec.family());
        write_density_csv(*mu, path_in(dir, "density.csv"), p.value("points", 400));
        out << mu->name() << " a_w " << fmt(mu->a_w()) << " b_w " << fmt(mu->b_w()) << '\n';
        return {{"density.csv"}, 0};
    }
    if (mode != "solve") throw ConfigError("equilibrium: mode must be closed or solve");
    auto [lo, hi] = solve_range(spec, p);
    auto nodes = uniform_nodes(lo, hi, p.value("nodes", 512));
    auto r = solve_equilibrium(spec, nodes);
    write_grid_csv(r.measure, path_in(dir, "equilibrium.csv"));
    json j{{"lo", lo},
           {"hi", hi},
           {"nodes", nodes.size()},
           {"energy", r.energy},
           {"iterations", r.iterations},
           {"flatness", r.flatness},
           {"off_support_gap", r.off_support_gap},
           {"support_right_edge", support_right_edge(r.measure)}};
    if (auto mu = limiting_measure(spec)) j["l1_to_closed_form"] = l1_distance(r.measure, *mu);
    write_json(j, path_in(dir, "equilibrium.json"));
    out << j.dump(2) << '\n';
    return {{"equilibrium.csv", "equilibrium.json"}, 0};
}

CommandResult cmd_rate(const json& p, const std::string& dir, std::ostream& out) {
    auto spec = build_ensemble(p);
    auto f = rate_evaluator(spec, p.value("method", std::string("auto")));
    if (p.contains("x") && !p.at("x").is_null()) {
        out << fmt(f(p.at("x").get<double>())) << '\n';
        return {};
    }
    double lo = get<double>(p, "lo"), hi = get<double>(p, "hi");
    int points = p.value("points", 101);
    if (points < 2 || !(hi > lo)) throw ConfigError("rate: need lo < hi and points >= 2");
    RateCurve c;
    for (int k = 0; k < points; ++k) {
        double x = lo + (hi - lo) * k / (points - 1);
        c.x.push_back(x);
        c.value.push_back(f(x));
    }
    write_rate_csv(c, path_in(dir, "rate.csv"));
    out << "wrote " << points << " points to " << path_in(dir, "rate.csv") << '\n';
    return {{"rate.csv"}, 0};
}

CommandResult cmd_sample(const json& p, const std::string& dir, std::ostream& out) {
    auto spec = build_ensemble(p);
    int n = get<int>(p, "n");
    auto s = chain_settings(p);
    auto r = sample_chain(spec, n, s);
    write_chain_csv(r, path_in(dir, "chain.csv"));
    json final_config = json::array();
    for (double v : r.retained.back()) final_config.push_back(v);
    json j{{"n", n},
           {"p", spec.p(n)},
           {"retained", r.retained.size()},
           {"acceptance", r.acceptance},
           {"proposal_scale", r.proposal_scale},
           {"autocorrelation_time", r.autocorrelation_time},
           {"final_lambda_max", r.lambda_max.back()},
           {"coordinate_acceptance", r.coordinate_acceptance},
           {"final_configuration", final_config}};
    if (auto mu = limiting_measure(spec))
        j["ks_final_to_limit"] = ks_distance(empirical_measure(r, r.retained.size() - 1), *mu);
    if (auto b = known_right_edge(spec)) j["b_w"] = *b;
    write_json(j, path_in(dir, "sample.json"));
    out << "acceptance " << fmt(r.acceptance) << " lambda* " << fmt(r.lambda_max.back());
    if (j.contains("ks_final_to_limit")) out << " ks " << fmt(j["ks_final_to_limit"].get<double>());
    out << '\n';
    return {{"chain.csv", "sample.json"}, 0};
}

CommandResult cmd_tail(const json& p, const std::string& dir, std::ostream& out) {
    auto spec = build_ensemble(p);
    double x = get<double>(p, "x");
    auto n_list = get<std::vector<int>>(p, "n_list");
    long trials = get<long>(p, "trials");
    long sweeps = p.value("sweeps", 200L);
    if (n_list.empty()) throw ConfigError("tail: n_list is empty");
    if (sweeps < 2) throw ConfigError("tail: sweeps must be >= 2");
    for (std::size_t k = 1; k < n_list.size(); ++k)
        if (n_list[k] <= n_list[k - 1]) throw DomainError("tail: n_list must be strictly increasing");
    auto base = chain_settings(p);
    int threads = worker_threads();

    std::vector<TailEstimate> pts;
    json rows = json::array();
    for (int n : n_list) {
        ChainSettings s = base;
        s.steps = sweeps * spec.p(n);
        s.burn_in = s.steps / 2;
        auto e = estimate_tail(spec, n, x, trials, s, threads);
        pts.push_back(e);
        rows.push_back(tail_json(e, chain_seed(base.seed, std::uint64_t(n))));
        out << "n " << n << " hits " << e.hits << "/" << e.trials << " -log(P)/n "
            << fmt(e.neg_log_rate) << '\n';
    }
    json j{{"x", x}, {"sweeps", sweeps}, {"estimates", rows}};
    try {
        j["reference_rate"] = num(rate_general(make_rate_context(spec), x));
    } catch (const UnsupportedError&) {
    }
    int code = 0;
    if (pts.size() >= 3) {
        json fit;
        ScalingReport r;
        try {
            r = fit_tail_scaling(pts);
            fit["status"] = "fitted";
        } catch (const InconclusiveStudy& e) {
            r = e.partial;
            fit["status"] = "inconclusive";
            fit["reason"] = e.what();
            code = 2;
        }
        if (fit["status"] == "fitted") {
            fit["slope"] = r.slope;
            fit["intercept"] = r.intercept;
            fit["residuals"] = r.residuals;
            fit["monotone"] = r.monotone;
            fit["no_decay"] = r.no_decay;
            out << "slope " << fmt(r.slope) << (r.monotone ? "" : " (not monotone)")
                << (r.no_decay ? " (no decay)" : "") << '\n';
        } else {
            out << "study inconclusive: " << fit["reason"].get<std::string>() << '\n';
        }
        j["fit"] = fit;
    }
    write_json(j, path_in(dir, "tail.json"));
    return {{"tail.json"}, code};
}

CommandResult cmd_angelesco(const json& p, const std::string& dir, std::ostream& out) {
    auto iv = get<std::vector<std::vector<double>>>(p, "intervals");
    auto ratios = get<std::vector<double>>(p, "ratios");
    auto quad = p.value("quad", std::vector<double>(iv.size(), 1.0));
    auto lin = p.value("lin", std::vector<double>(iv.size(), 0.0));
    if (quad.size() != iv.size() || lin.size() != iv.size())
        throw ConfigError("angelesco: one quad and lin coefficient per interval");
    AngelescoSpec a;
    for (std::size_t i = 0; i < iv.size(); ++i) {
        if (iv[i].size() != 2) throw ConfigError("angelesco: intervals are lo:hi pairs");
        a.intervals.push_back(Interval{iv[i][0], iv[i][1]});
        double q = quad[i], l = lin[i];
        a.potentials.push_back([q, l](double t) { return q * t * t + l * t; });
    }
    a.ratios = ratios;
    validate(a);
    int count = p.value("nodes", 128);
    std::vector<std::vector<double>> nodes;
    for (const auto& I : a.intervals) nodes.push_back(uniform_nodes(I.lo, I.hi, count));
    auto eq = solve_angelesco(a, nodes);

    AngelescoContext ctx{a, eq.measures, 0.0, p.value("symmetrized", false)};
    json zj = p.value("zeta", json("edge"));
    ctx.zeta_a = zj.is_string() ? angelesco_edge_zeta(ctx) : zj.get<double>();

    CommandResult res;
    json edges = json::array();
    for (std::size_t i = 0; i < eq.measures.size(); ++i) {
        std::string name = "angelesco_" + std::to_string(i) + ".csv";
        write_grid_csv(eq.measures[i], path_in(dir, name));
        res.files.push_back(name);
        edges.push_back(support_right_edge(eq.measures[i]));
    }
    json j{{"energy", eq.energy},
           {"iterations", eq.iterations},
           {"flatness", eq.flatness},
           {"off_support_gap", eq.off_support_gap},
           {"right_edges", edges},
           {"zeta_a", ctx.zeta_a},
           {"symmetrized", ctx.symmetrized}};
    if (p.contains("x") && !p.at("x").is_null()) {
        auto xs = p.at("x").get<std::vector<double>>();
        double v = rate_angelesco(ctx, xs);
        j["rate"] = num(v);
        out << fmt(v) << '\n';
    }
    write_json(j, path_in(dir, "angelesco.json"));
    res.files.push_back("angelesco.json");
    if (!j.contains("rate")) out << j.dump(2) << '\n';
    return res;
}

} // namespace

TauRule parse_tau(const std::string& text) {
    if (text.empty()) throw ConfigError("empty tau");
    TauRule t;
    std::string s = text;
    t.per_n = s.back() == 'n';
    if (t.per_n) s.pop_back();
    if (s.empty()) return t;
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        t.num = parse_long(s, "tau");
    } else {
        t.num = parse_long(s.substr(0, slash), "tau");
        t.den = parse_long(s.substr(slash + 1), "tau");
    }
    if (t.num <= 0 || t.den <= 0) throw ConfigError("tau must be positive");
    return t;
}

EnsembleSpec build_ensemble(const json& p) {
    auto name = get<std::string>(p, "ensemble");
    if (name == "bosonic") return make_bosonic(p.value("alpha", 0), parse_tau(p.value("tau", std::string("n"))));
    if (name == "laguerre")
        return make_laguerre(p.value("theta", 2), p.value("l", 0), parse_tau(p.value("tau", std::string("n"))),
                             p.value("l_slope", 0.0));
    if (name == "wd") return make_gaussian_wd(p.value("beta", 2.0));
    if (name == "goe") return make_gaussian_wd(1.0);
    if (name == "gue") return make_gaussian_wd(2.0);
    if (name == "gse") return make_gaussian_wd(4.0);
    if (name == "bdg") return make_bdg(bdg_class(p.value("class", std::string("D"))), p.value("sigma2", 1.0));
    if (name == "chiral")
        return make_chiral(chiral_class(p.value("class", std::string("AIII"))), p.value("kappa", 0.25),
                           p.value("sigma2", 1.0));
    if (name == "grid") {
        auto form = p.value("form", std::string("biorthogonal"));
        DensityForm f;
        if (form == "biorthogonal") f = DensityForm::Biorthogonal;
        else if (form == "beta-theta") f = DensityForm::BetaTheta;
        else throw ConfigError("form must be biorthogonal or beta-theta");
        return make_grid_custom(load_grid_custom_csv(get<std::string>(p, "grid")), p.value("theta", 1),
                                p.value("beta", 1.0), p.value("kappa", 1.0), f);
    }
    throw ConfigError("unknown ensemble '" + name + "'");
}

CommandResult run_command(const std::string& command, const json& params, const std::string& out_dir,
                          std::ostream& out) {
    fs::create_directories(out_dir);
    if (command == "partition") return cmd_partition(params, out_dir, out);
    if (command == "xi") return cmd_xi(params, out_dir, out);
    if (command == "equilibrium") return cmd_equilibrium(params, out_dir, out);
    if (command == "rate") return cmd_rate(params, out_dir, out);
    if (command == "sample") return cmd_sample(params, out_dir, out);
    if (command == "tail") return cmd_tail(params, out_dir, out);
    if (command == "angelesco") return cmd_angelesco(params, out_dir, out);
    throw ConfigError("unknown command '" + command + "'");
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

json make_manifest(const std::string& command, const json& params, const std::string& out_dir,
                   const std::vector<std::string>& files) {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    json outputs = json::object();
    for (const auto& f : files) outputs[f] = file_digest(path_in(out_dir, f));
    return {{"tool", kToolName},
            {"version", kToolVersion},
            {"command", command},
            {"params", params},
            {"seed", params.contains("seed") ? params.at("seed") : json()},
            {"created", ts.str()},
            {"outputs", outputs}};
}

} // namespace ldp::app
