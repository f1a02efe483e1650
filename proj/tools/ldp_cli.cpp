#include "acceptance.hpp"
#include "app.hpp"

#include "ldp/errors.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using nlohmann::json;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitAccuracy = 2;
constexpr int kExitUsage = 64;

struct EnsembleFlags {
    std::string ensemble;
    int alpha = 0;
    std::string tau = "n";
    int theta = 2;
    int l = 0;
    double l_slope = 0.0;
    double beta = 2.0;
    std::string cls;
    double sigma2 = 1.0;
    double kappa = 0.25;
    std::string grid;
    std::string form = "biorthogonal";

    void add(CLI::App* sub) {
        sub->add_option("--ensemble", ensemble,
                        "bosonic, laguerre, wd, goe, gue, gse, bdg, chiral or grid")
            ->required();
        sub->add_option("--alpha", alpha, "bosonic x^alpha exponent");
        sub->add_option("--tau", tau, "rate: 'n', '2n', '1/2n' or a constant such as '1'");
        sub->add_option("--theta", theta, "laguerre/grid theta");
        sub->add_option("--l", l, "laguerre exponent");
        sub->add_option("--l-slope", l_slope, "laguerre l(n) = l + floor(slope n)");
        sub->add_option("--beta", beta, "wd/grid beta");
        sub->add_option("--class", cls, "bdg: B, D, C, CI; chiral: BDI, AIII, CII");
        sub->add_option("--sigma2", sigma2, "bdg/chiral variance");
        sub->add_option("--kappa", kappa, "chiral/grid kappa");
        sub->add_option("--grid", grid, "grid: CSV of x,log_w");
        sub->add_option("--form", form, "grid: biorthogonal or beta-theta");
    }

    json to_json() const {
        json j{{"ensemble", ensemble}};
        if (ensemble == "bosonic") {
            j["alpha"] = alpha;
            j["tau"] = tau;
        } else if (ensemble == "laguerre") {
            j["theta"] = theta;
            j["l"] = l;
            j["l_slope"] = l_slope;
            j["tau"] = tau;
        } else if (ensemble == "wd") {
            j["beta"] = beta;
        } else if (ensemble == "bdg") {
            j["class"] = cls.empty() ? "D" : cls;
            j["sigma2"] = sigma2;
        } else if (ensemble == "chiral") {
            j["class"] = cls.empty() ? "AIII" : cls;
            j["sigma2"] = sigma2;
            j["kappa"] = kappa;
        } else if (ensemble == "grid") {
            j["grid"] = grid;
            j["theta"] = theta;
            j["beta"] = beta;
            j["kappa"] = kappa;
            j["form"] = form;
        }
        return j;
    }
};

struct ChainFlags {
    long steps = 100000;
    long burn_in = 10000;
    long thinning = 1;
    std::uint64_t seed = 0;
    double proposal_scale = 0.1;
    bool no_adapt = false;
    double init_lo = 0.0;
    double init_hi = 1.0;

    void add(CLI::App* sub, bool with_lengths) {
        if (with_lengths) {
            sub->add_option("--steps", steps, "single-coordinate proposals");
            sub->add_option("--burn-in", burn_in);
            sub->add_option("--thinning", thinning);
        }
        sub->add_option("--seed", seed, "64-bit seed")->required();
        sub->add_option("--scale", proposal_scale, "initial proposal scale");
        sub->add_flag("--no-adapt", no_adapt, "keep the proposal scale fixed during burn-in");
        sub->add_option("--init-lo", init_lo, "start box when no closed-form limit exists");
        sub->add_option("--init-hi", init_hi);
    }

    void fill(json& j, bool with_lengths) const {
        if (with_lengths) {
            j["steps"] = steps;
            j["burn_in"] = burn_in;
            j["thinning"] = thinning;
        }
        j["seed"] = seed;
        j["proposal_scale"] = proposal_scale;
        j["adapt"] = !no_adapt;
        j["init_lo"] = init_lo;
        j["init_hi"] = init_hi;
    }
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

int run(const std::string& command, const json& params, const std::string& out_dir,
        const std::optional<json>& expected) {
    auto res = ldp::app::run_command(command, params, out_dir, std::cout);
    auto manifest = ldp::app::make_manifest(command, params, out_dir, res.files);
    if (expected) {
        const json recorded = expected->value("outputs", json::object());
        int mismatched = 0;
        for (const auto& [name, digest] : recorded.items()) {
            if (manifest["outputs"].value(name, std::string()) != digest.get<std::string>()) {
                std::cerr << "manifest: " << name << " differs from the recorded output\n";
                ++mismatched;
            }
        }
        std::cerr << "manifest: " << recorded.size() - mismatched << " of " << recorded.size()
                  << " outputs reproduced\n";
        if (mismatched) return kExitAccuracy;
    }
    std::ofstream(std::filesystem::path(out_dir) / "manifest.json") << manifest.dump(2) << '\n';
    return res.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenvalue large deviations toolkit"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    std::string manifest_path;
    std::string out_dir = "ldp_out";
    app.add_option("--from-manifest", manifest_path, "re-run the command recorded in a manifest");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    EnsembleFlags ens_partition, ens_xi, ens_eq, ens_rate, ens_sample, ens_tail;

    auto* partition = app.add_subcommand("partition", "exact and closed-form Z_n");
    ens_partition.add(partition);
    int pn = 1;
    bool exact = false, closed = false;
    partition->add_option("--n", pn)->required();
    partition->add_flag("--exact", exact, "exact rational value");
    partition->add_flag("--closed", closed, "log Z_n from the closed form");

    auto* xi = app.add_subcommand("xi", "empirical and asymptotic xi over an n range");
    ens_xi.add(xi);
    int n_min = 10, n_max = 400;
    std::string convention = "native";
    xi->add_option("--n-min", n_min)->capture_default_str();
    xi->add_option("--n-max", n_max)->capture_default_str();
    xi->add_option("--convention", convention, "native, proof or same-weight")->capture_default_str();

    auto* eq = app.add_subcommand("equilibrium", "closed-form density export or numerical solve");
    ens_eq.add(eq);
    std::string mode = "solve";
    int nodes = 512, points = 400;
    std::optional<double> lo, hi;
    eq->add_option("--mode", mode, "closed or solve")->capture_default_str();
    eq->add_option("--nodes", nodes)->capture_default_str();
    eq->add_option("--points", points, "density samples for --mode closed")->capture_default_str();
    eq->add_option("--lo", lo);
    eq->add_option("--hi", hi);

    auto* rate = app.add_subcommand("rate", "rate function at a point or as a CSV curve");
    ens_rate.add(rate);
    std::optional<double> rx, rlo, rhi;
    int rpoints = 101;
    std::string method = "auto";
    rate->add_option("--x", rx);
    rate->add_option("--lo", rlo);
    rate->add_option("--hi", rhi);
    rate->add_option("--points", rpoints)->capture_default_str();
    rate->add_option("--method", method, "auto, closed or quadrature")->capture_default_str();

    auto* sample = app.add_subcommand("sample", "Metropolis-within-Gibbs chain");
    ens_sample.add(sample);
    ChainFlags chain_sample;
    chain_sample.add(sample, true);
    int sn = 1;
    sample->add_option("--n", sn)->required();

    auto* tail = app.add_subcommand("tail", "largest-eigenvalue tail scaling study");
    ens_tail.add(tail);
    ChainFlags chain_tail;
    chain_tail.add(tail, false);
    double tx = 0.0;
    std::vector<int> n_list;
    long trials = 20000, sweeps = 200;
    tail->add_option("--x", tx)->required();
    tail->add_option("--n-list", n_list)->required()->delimiter(',');
    tail->add_option("--trials", trials)->capture_default_str();
    tail->add_option("--sweeps", sweeps, "chain length in sweeps of p(n) steps, half burn-in")
        ->capture_default_str();

    auto* ang = app.add_subcommand("angelesco", "vector equilibrium and rate of an Angelesco ensemble");
    std::vector<std::string> intervals;
    std::string ratios, quad, lin, ax, zeta = "edge";
    int anodes = 128;
    bool symmetrized = false;
    ang->add_option("--intervals", intervals, "lo:hi per component")->required()->delimiter(',');
    ang->add_option("--ratios", ratios, "comma list r_i")->required();
    ang->add_option("--quad", quad, "comma list a_i in V_i = a_i x^2 + b_i x");
    ang->add_option("--lin", lin, "comma list b_i");
    ang->add_option("--nodes", anodes)->capture_default_str();
    ang->add_option("--x", ax, "comma list x_i for the rate");
    ang->add_option("--zeta", zeta, "number or 'edge'")->capture_default_str();
    ang->add_flag("--symmetrized", symmetrized);

    auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
    std::vector<int> only;
    selftest->add_option("--only", only, "criterion numbers")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        std::optional<json> expected;
        std::string command;
        json params;
        if (!manifest_path.empty()) {
            if (!app.get_subcommands().empty()) {
                std::cerr << "--from-manifest takes no subcommand\n";
                return kExitUsage;
            }
            std::ifstream in(manifest_path);
            if (!in) throw ldp::ConfigError("cannot open " + manifest_path);
            expected = json::parse(in);
            command = expected->at("command").get<std::string>();
            params = expected->at("params");
        } else if (*selftest) {
            auto outcomes = ldp::acceptance::run(only, std::cout);
            for (const auto& o : outcomes)
                if (!o.pass) return kExitAccuracy;
            return 0;
        } else if (*partition) {
            command = "partition";
            params = ens_partition.to_json();
            params["n"] = pn;
            params["exact"] = exact;
            params["closed"] = closed;
        } else if (*xi) {
            command = "xi";
            params = ens_xi.to_json();
            params["n_min"] = n_min;
            params["n_max"] = n_max;
            params["convention"] = convention;
        } else if (*eq) {
            command = "equilibrium";
            params = ens_eq.to_json();
            params["mode"] = mode;
            params["nodes"] = nodes;
            params["points"] = points;
            if (lo) params["lo"] = *lo;
            if (hi) params["hi"] = *hi;
        } else if (*rate) {
            command = "rate";
            params = ens_rate.to_json();
            params["method"] = method;
            if (rx) {
                params["x"] = *rx;
            } else {
                if (!rlo || !rhi) {
                    std::cerr << "rate: give --x or both --lo and --hi\n";
                    return kExitUsage;
                }
                params["lo"] = *rlo;
                params["hi"] = *rhi;
                params["points"] = rpoints;
            }
        } else if (*sample) {
            command = "sample";
            params = ens_sample.to_json();
            params["n"] = sn;
            chain_sample.fill(params, true);
        } else if (*tail) {
            command = "tail";
            params = ens_tail.to_json();
            params["x"] = tx;
            params["n_list"] = n_list;
            params["trials"] = trials;
            params["sweeps"] = sweeps;
            chain_tail.fill(params, false);
        } else if (*ang) {
            command = "angelesco";
            json iv = json::array();
            for (const auto& s : intervals) {
                auto c = s.find(':');
                if (c == std::string::npos) throw ldp::ConfigError("interval '" + s + "' is not lo:hi");
                iv.push_back({std::stod(s.substr(0, c)), std::stod(s.substr(c + 1))});
            }
            params["intervals"] = iv;
            params["ratios"] = parse_list(ratios);
            if (!quad.empty()) params["quad"] = parse_list(quad);
            if (!lin.empty()) params["lin"] = parse_list(lin);
            params["nodes"] = anodes;
            if (!ax.empty()) params["x"] = parse_list(ax);
            params["zeta"] = zeta == "edge" ? json("edge") : json(std::stod(zeta));
            params["symmetrized"] = symmetrized;
        } else {
            std::cerr << app.help();
            return kExitUsage;
        }
        return run(command, params, out_dir, expected);
    } catch (const ldp::AccuracyError& e) {
        std::cerr << "accuracy: " << e.what() << " (estimate " << e.estimate << ", error " << e.error_bound
                  << ")\n";
        return kExitAccuracy;
    } catch (const ldp::ConvergenceError& e) {
        std::cerr << "convergence: " << e.what() << '\n';
        return kExitAccuracy;
    } catch (const ldp::InconclusiveError& e) {
        std::cerr << "inconclusive: " << e.what() << '\n';
        return kExitAccuracy;
    } catch (const ldp::DegeneracyError& e) {
        std::cerr << "degenerate: " << e.what() << '\n';
        return kExitAccuracy;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    }
}
