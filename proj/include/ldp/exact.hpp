#pragma once

#include "ldp/ensemble.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace ldp {

using ExactScalar = boost::multiprecision::cpp_rational;
using ExactMatrix = std::vector<std::vector<ExactScalar>>;

inline constexpr int kExactSizeCap = 8;

// x^a e^{-tau x} on [0, inf)
struct LaguerreType {
    long a = 0;
    ExactScalar tau = 1;
};

// The factorial-moment form of w_n^n; UnsupportedError for other families.
LaguerreType laguerre_type(const EnsembleSpec& spec, int n);

ExactScalar factorial(long k);

// int_0^inf x^k x^a e^{-tau x} dx = (k+a)! / tau^{k+a+1}
ExactScalar moment(const LaguerreType& w, long k);
ExactScalar moment(const EnsembleSpec& spec, int n, long k);

struct BiorthogonalSystem {
    int n = 0;
    int theta = 1;
    ExactMatrix p_polys;  // p_polys[i][k]: coefficient of x^k
    ExactMatrix q_polys;  // q_polys[j][k]: coefficient of (x^theta)^k
    std::vector<ExactScalar> h;
    ExactMatrix gram;     // gram[i][j] = moment(i + theta j)
};

// sum_{k,l} a[k] b[l] moment(k + theta l)
ExactScalar pairing(const LaguerreType& w, int theta, const std::vector<ExactScalar>& a,
                    const std::vector<ExactScalar>& b);

BiorthogonalSystem biorthogonalize(const EnsembleSpec& spec, int n, int cap = kExactSizeCap);

ExactScalar determinant(ExactMatrix m);

// n! det g
ExactScalar partition_exact(const EnsembleSpec& spec, int n, int cap = kExactSizeCap);

std::string to_fraction_string(const ExactScalar& v);
double to_double(const ExactScalar& v);

} // namespace ldp
