#include "ldp/exact.hpp"

#include "ldp/errors.hpp"

#include <cmath>

namespace ldp {

namespace {

ExactScalar rational_tau(const TauRule& t, int n) {
    if (t.den == 0) throw ConfigError("tau denominator is zero");
    ExactScalar tau(t.num);
    tau /= t.den;
    if (t.per_n) tau *= n;
    if (tau <= 0) throw ConfigError("tau must be positive");
    return tau;
}

ExactScalar rpow(const ExactScalar& x, long k) {
    ExactScalar r = 1;
    for (long i = 0; i < k; ++i) r *= x;
    return r;
}

} // namespace

LaguerreType laguerre_type(const EnsembleSpec& spec, int n) {
    if (auto* b = std::get_if<Bosonic>(&spec.weight)) return {b->alpha, rational_tau(b->tau, n)};
    if (auto* l = std::get_if<LaguerreBi>(&spec.weight)) return {l->l_at(n), rational_tau(l->tau, n)};
    throw UnsupportedError("exact path needs a factorial-moment weight (bosonic or laguerre)");
}

ExactScalar factorial(long k) {
    boost::multiprecision::cpp_int f = 1;
    for (long i = 2; i <= k; ++i) f *= i;
    return ExactScalar(f);
}

ExactScalar moment(const LaguerreType& w, long k) {
    if (k < 0) throw DomainError("moment: negative order");
    return factorial(k + w.a) / rpow(w.tau, k + w.a + 1);
}

ExactScalar moment(const EnsembleSpec& spec, int n, long k) { return moment(laguerre_type(spec, n), k); }

ExactScalar pairing(const LaguerreType& w, int theta, const std::vector<ExactScalar>& a,
                    const std::vector<ExactScalar>& b) {
    ExactScalar s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] == 0) continue;
        for (std::size_t l = 0; l < b.size(); ++l)
            if (b[l] != 0) s += a[k] * b[l] * moment(w, long(k) + long(theta) * long(l));
    }
    return s;
}

BiorthogonalSystem biorthogonalize(const EnsembleSpec& spec, int n, int cap) {
    if (n < 1) throw DomainError("biorthogonalize: n must be >= 1");
    if (n > cap) throw DomainError("biorthogonalize: n above the exact-size cap");
    LaguerreType w = laguerre_type(spec, n);
    int m = spec.p(n);
    BiorthogonalSystem sys;
    sys.n = m;
    sys.theta = spec.theta;
    sys.gram.assign(m, std::vector<ExactScalar>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) sys.gram[i][j] = moment(w, i + long(spec.theta) * j);

    // two-sided Gram-Schmidt on eta_i = x^i, xi_j = x^{theta j}
    for (int i = 0; i < m; ++i) {
        std::vector<ExactScalar> p(m), q(m);
        p[i] = 1;
        q[i] = 1;
        for (int j = 0; j < i; ++j) {
            ExactScalar cp = pairing(w, spec.theta, p, sys.q_polys[j]) / sys.h[j];
            ExactScalar cq = pairing(w, spec.theta, sys.p_polys[j], q) / sys.h[j];
            for (int k = 0; k <= j; ++k) {
                p[k] -= cp * sys.p_polys[j][k];
                q[k] -= cq * sys.q_polys[j][k];
            }
        }
        ExactScalar h = pairing(w, spec.theta, p, q);
        if (h == 0) throw DegeneracyError("biorthogonalize: singular Gram matrix");
        sys.p_polys.push_back(std::move(p));
        sys.q_polys.push_back(std::move(q));
        sys.h.push_back(h);
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            ExactScalar v = pairing(w, spec.theta, sys.p_polys[i], sys.q_polys[j]);
            if (v != (i == j ? sys.h[i] : ExactScalar(0)))
                throw DegeneracyError("biorthogonalize: orthogonality check failed");
        }
    return sys;
}

ExactScalar determinant(ExactMatrix a) {
    std::size_t n = a.size();
    ExactScalar det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a[r][c] == 0) continue;
            ExactScalar f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

ExactScalar partition_exact(const EnsembleSpec& spec, int n, int cap) {
    BiorthogonalSystem sys = biorthogonalize(spec, n, cap);
    ExactScalar det = determinant(sys.gram);
    if (det == 0) throw DegeneracyError("partition_exact: singular Gram matrix");
    return factorial(sys.n) * det;
}

std::string to_fraction_string(const ExactScalar& v) {
    return boost::multiprecision::numerator(v).str() + "/" + boost::multiprecision::denominator(v).str();
}

double to_double(const ExactScalar& v) { return v.convert_to<double>(); }

} // namespace ldp
