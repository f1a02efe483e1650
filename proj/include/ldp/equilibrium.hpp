#pragma once

#include "ldp/ensemble.hpp"
#include "ldp/errors.hpp"
#include "ldp/measure.hpp"

#include <vector>

namespace ldp {

struct EquilibriumOptions {
    int max_iter = 200000;
    double tol = 1e-10;        // objective decrease per step
    double gap_tol = 1e-8;     // Frank-Wolfe duality gap
    double support_cut = 1e-10;
};

struct EquilibriumNotConverged : ConvergenceError {
    std::vector<double> last_iterate;
    std::vector<double> history;
    EquilibriumNotConverged(const std::string& what, std::vector<double> z, std::vector<double> h)
        : ConvergenceError(what), last_iterate(std::move(z)), history(std::move(h)) {}
};

struct EquilibriumResult {
    SpectralMeasure measure = SpectralMeasure::grid({0.0}, {1.0});
    double energy = 0.0;
    int iterations = 0;
    double flatness = 0.0;        // spread of the gradient on the numerical support
    double off_support_gap = 0.0; // min off-support gradient minus the support level
    std::vector<double> history;
};

// `count` cell centres covering [lo, hi].
std::vector<double> uniform_nodes(double lo, double hi, int count);

// Minimizer over probability vectors on `nodes` of
// E = -(kappa/2) sum K_ij p_i p_j - sum log w(x_i) p_i,
// K = beta_eff (log|x-y| + log|x^theta-y^theta|), each entry averaged over cell j.
EquilibriumResult solve_equilibrium(const EnsembleSpec& spec, const std::vector<double>& nodes,
                                    const EquilibriumOptions& opt = {});

struct AngelescoEquilibrium {
    std::vector<SpectralMeasure> measures;
    double energy = 0.0;
    int iterations = 0;
    double flatness = 0.0;
    double off_support_gap = 0.0;
    std::vector<double> history;
};

// Vector equilibrium of the Angelesco energy
// sum r_i int V_i dmu_i - sum r_i^2 iint log|x-y| dmu_i dmu_i - sum_{i<j} r_i r_j iint log|x-y| dmu_i dmu_j
// with component i on nodes[i] inside Gamma_i.
AngelescoEquilibrium solve_angelesco(const AngelescoSpec& aspec,
                                     const std::vector<std::vector<double>>& nodes,
                                     const EquilibriumOptions& opt = {});

// Euclidean projection onto the probability simplex, in place.
void project_simplex(std::vector<double>& v);

} // namespace ldp
