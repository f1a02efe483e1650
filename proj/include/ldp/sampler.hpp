#pragma once

#include "ldp/ensemble.hpp"
#include "ldp/errors.hpp"
#include "ldp/measure.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ldp {

// One step is one single-coordinate proposal; coordinates are visited in turn.
struct ChainSettings {
    long steps = 100000;
    long burn_in = 10000;
    long thinning = 1;
    std::uint64_t seed = 0;
    double proposal_scale = 0.1;
    bool adapt = true;
    // initial box when no closed-form limiting measure is available
    double init_lo = 0.0;
    double init_hi = 1.0;
};

void validate(const ChainSettings& s);

struct ChainResult {
    int n = 0;
    std::vector<std::vector<double>> retained;   // configurations after burn-in, every `thinning` steps
    std::vector<long> retained_step;
    std::vector<double> lambda_max;              // lambda* at each retained state
    std::vector<double> acceptance_running;      // post-burn-in acceptance rate at each retained state
    std::vector<double> coordinate_acceptance;   // post-burn-in, per coordinate
    double acceptance = 0.0;
    double proposal_scale = 0.0;                 // frozen value after burn-in
    double autocorrelation_time = 1.0;           // integrated, of the lambda* series
};

// Derived seed of chain `index`: SplitMix64 of (seed, index).
std::uint64_t chain_seed(std::uint64_t seed, std::uint64_t index);

// Initial configuration: limiting-measure quantiles (i - 1/2)/p, else evenly spread over the box.
std::vector<double> initial_configuration(const EnsembleSpec& spec, int n, const ChainSettings& s);

ChainResult sample_chain(const EnsembleSpec& spec, int n, const ChainSettings& settings);

// Log-density change when coordinate i of `values` moves to `y`.
double log_density_delta(const EnsembleSpec& spec, int n, const std::vector<double>& values,
                         std::size_t i, double y);

EmpiricalMeasure empirical_measure(const ChainResult& r, std::size_t index, std::vector<double> edges = {});

// Sokal-window integrated autocorrelation time (>= 1).
double integrated_autocorrelation(const std::vector<double>& series);

void write_chain_csv(const ChainResult& r, const std::string& path);

// Worker count from LDP_THREADS (default: hardware concurrency).
int worker_threads();

struct TailEstimate {
    double x = 0.0;
    int n = 0;
    long hits = 0;
    long trials = 0;
    double neg_log_rate = kInf;  // -(1/n) log(hits/trials), +inf when censored
    double lower_bound = 0.0;    // log(trials)/n, meaningful when censored
    double wilson_lo = 0.0;
    double wilson_hi = 1.0;
    bool censored = true;
};

TailEstimate make_tail_estimate(double x, int n, long hits, long trials);

// One Bernoulli trial per independent chain (final state's lambda* >= x).
// threads = 0 reads LDP_THREADS.
TailEstimate estimate_tail(const EnsembleSpec& spec, int n, double x, long trials,
                           const ChainSettings& settings, int threads = 0);

struct ScalingReport {
    std::vector<TailEstimate> points;
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;  // per uncensored point
    bool monotone = false;          // -log P-hat nondecreasing in n over uncensored points
    bool no_decay = false;
};

struct InconclusiveStudy : InconclusiveError {
    ScalingReport partial;
    InconclusiveStudy(const std::string& what, ScalingReport r)
        : InconclusiveError(what), partial(std::move(r)) {}
};

// Least squares of -log P-hat = slope n + intercept over uncensored points.
ScalingReport fit_tail_scaling(std::vector<TailEstimate> points);

ScalingReport tail_scaling_study(const EnsembleSpec& spec, double x, const std::vector<int>& n_list,
                                 long trials, const ChainSettings& settings, int threads = 0);

} // namespace ldp
