#pragma once

#include <stdexcept>
#include <string>

namespace ldp {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature or other numerical failure; carries the best available estimate.
struct AccuracyError : std::runtime_error {
    double estimate;
    double error_bound;
    AccuracyError(const std::string& what, double est, double err)
        : std::runtime_error(what), estimate(est), error_bound(err) {}
};

struct InitializationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InconclusiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ldp
