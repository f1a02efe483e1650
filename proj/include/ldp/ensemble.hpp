#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ldp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    double lo = -kInf;
    double hi = kInf;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// Biorthogonal: prod |l_i - l_j| |l_i^theta - l_j^theta|.
// BetaTheta:    prod |l_i^theta - l_j^theta|^beta.
enum class DensityForm { Biorthogonal, BetaTheta };

// tau = (num/den) * n when per_n, else num/den.
struct TauRule {
    long num = 1;
    long den = 1;
    bool per_n = true;
    double value(int n) const;
    double scale() const { return double(num) / double(den); }
};

struct Bosonic {
    int alpha = 0;
    TauRule tau;
};

struct LaguerreBi {
    int theta = 2;
    int l = 0;
    double l_slope = 0.0;  // l(n) = l + floor(l_slope * n)
    TauRule tau;
    int l_at(int n) const;
};

struct GaussianWD {
    double beta = 2.0;
};

enum class BdGClass { B, D, C, CI };

struct BdGParams {
    double alpha;
    double beta;
    double psi;
};

BdGParams bdg_params(BdGClass cls);

struct BdG {
    BdGClass cls = BdGClass::D;
    double sigma2 = 1.0;
};

enum class ChiralClass { BDI, AIII, CII };

double chiral_beta(ChiralClass cls);

// s(n) = max(1, round(kappa n)) points, t(n) = n - s(n).
struct Chiral {
    ChiralClass cls = ChiralClass::AIII;
    double beta = 2.0;
    double sigma2 = 1.0;
};

// Tabulated limit log-weight, linearly interpolated, n-independent.
struct GridCustom {
    std::vector<double> x;
    std::vector<double> log_w;
    double eval(double t) const;
};

using WeightFamily = std::variant<Bosonic, LaguerreBi, GaussianWD, BdG, Chiral, GridCustom>;

struct EnsembleSpec {
    int theta = 1;
    double beta = 1.0;
    double kappa = 1.0;
    std::vector<Interval> support{Interval{}};
    WeightFamily weight;
    DensityForm form = DensityForm::Biorthogonal;

    int p(int n) const;
    bool in_support(double x) const;
    double support_lo() const;
    double support_hi() const;
    double beta_eff() const { return form == DensityForm::Biorthogonal ? 1.0 : beta; }
    std::string family() const;
};

// Throws ConfigError when the spec violates its invariants.
void validate(const EnsembleSpec& spec);

EnsembleSpec make_bosonic(int alpha, TauRule tau = {});
EnsembleSpec make_laguerre(int theta, int l, TauRule tau = {}, double l_slope = 0.0);
EnsembleSpec make_gaussian_wd(double beta);
EnsembleSpec make_bdg(BdGClass cls, double sigma2 = 1.0);
EnsembleSpec make_chiral(ChiralClass cls, double kappa, double sigma2 = 1.0);
EnsembleSpec make_grid_custom(GridCustom grid, int theta, double beta, double kappa, DensityForm form);

GridCustom load_grid_custom_csv(const std::string& path);

// chiral (s, t) at matrix size n
std::pair<int, int> chiral_st(const EnsembleSpec& spec, int n);

// n * log w_n(x); -inf on the zero set.
double log_weight(const EnsembleSpec& spec, int n, double x);
// log w(x) of the limiting weight.
double log_weight_limit(const EnsembleSpec& spec, double x);

// Right endpoint of the limiting measure when it is known in closed form.
std::optional<double> known_right_edge(const EnsembleSpec& spec);

struct Configuration {
    int n = 1;
    std::vector<double> values;
    double lambda_max() const;
};

void check_configuration(const EnsembleSpec& spec, const Configuration& config);

// log of one pairwise interaction factor.
double pair_log(const EnsembleSpec& spec, double a, double b);

double log_joint_density(const EnsembleSpec& spec, const Configuration& config);

struct AngelescoSpec {
    std::vector<Interval> intervals;
    std::vector<std::function<double(double)>> potentials;
    std::vector<double> ratios;
    std::vector<int> sizes(int n) const;  // n_i = round(r_i n), last absorbs rounding
    int p() const { return int(intervals.size()); }
};

void validate(const AngelescoSpec& aspec);

double log_joint_density_angelesco(const AngelescoSpec& aspec,
                                   const std::vector<std::vector<double>>& components, int n);

bool lemma_bound_check(const EnsembleSpec& spec, double x, double lam, int n, double c);

struct LemmaConstant {
    double c;
    double T;        // tail threshold
    double sup_w;    // sup of w_n on the compact part
    double q;        // (theta+1)(kappa+eps)/2
};

LemmaConstant estimate_lemma_constant(const EnsembleSpec& spec, double epsilon = 0.5,
                                      int n_max = 200);

struct GrowthReport {
    std::vector<double> x;
    std::vector<double> value;  // |x|^{(theta+1)(kappa+eps)} sup_n w_n(x)
    bool pass = false;
    double threshold = kInf;    // beyond this the sequence decreases
};

GrowthReport check_growth_condition(const EnsembleSpec& spec, double epsilon,
                                    const std::vector<double>& grid,
                                    const std::vector<int>& n_set = {10, 20, 50, 100, 200, 500});

} // namespace ldp
