#pragma once

#include <functional>
#include <vector>

namespace ldp {

// Endpoint behaviour of an integrand; selects the substitution y = edge +/- L t^m.
enum class Edge {
    Regular,      // m = 1
    Sqrt,         // m = 2, also used for log singularities
    InvCubeRoot,  // m = 3
};

struct QuadOptions {
    double rel_tol = 1e-12;
    int max_depth = 15;   // 15 * 2^16 evaluations at most per panel
    double accept = 1e-6; // estimated-error bound (absolute, or relative if larger) before AccuracyError
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// Adaptive Gauss-Kronrod on [a, b] (finite), split at `breaks`; panels touching an
// endpoint or a break use the substitution for that point's behaviour.
QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                              Edge left, Edge right, std::vector<double> breaks = {},
                              const QuadOptions& opt = {});

} // namespace ldp
