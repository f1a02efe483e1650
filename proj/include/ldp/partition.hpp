#pragma once

#include "ldp/ensemble.hpp"

namespace ldp {

// log of int_{[0,inf)^m} prod_{i<j} |x_i-x_j||x_i^theta-x_j^theta| prod x^a e^{-tau x} dx
double log_z_laguerre(int theta, double a, double tau, int m);
// log of int_{R^m} prod |x_i-x_j|^beta prod e^{-c x^2} dx
double log_z_gaussian(double beta, double c, int m);
// log of int_{[0,inf)^m} prod |x_i^2-x_j^2|^beta prod x^e e^{-c x^2} dx
double log_z_half_selberg(double beta, double e, double c, int m);

// log Z_n from the closed forms (Laguerre/Selberg), c = 1.
double partition_closed_form(const EnsembleSpec& spec, int n);

// Closed-form limits of xi as stated for each family.
double xi_asymptotic(const EnsembleSpec& spec);

// Proof: the reduced system has p(n)-1 points and weight w_n^{n-1}.
// SameWeight: p(n)-1 points and weight w_n^n.
enum class XiConvention { Proof, SameWeight };

// Convention each closed-form constant is derived in: same-weight for bosonic,
// Laguerre and chiral, proof for Wigner-Dyson, BdG and anything else.
XiConvention native_convention(const EnsembleSpec& spec);

// (1/n)(log Z' - log Z_n)
double xi_empirical(const EnsembleSpec& spec, int n, XiConvention conv = XiConvention::Proof);

} // namespace ldp
