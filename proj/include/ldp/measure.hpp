#pragma once

#include "ldp/quadrature.hpp"

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace ldp {

// tau = scale * n; scale = 1 gives support (0, 3 sqrt 3].
struct BosonicRho {
    double scale = 1.0;
};

struct BdGMeasure {
    double psi = 2.0;
    double sigma2 = 1.0;
    double beta = 2.0;
    double kappa = 1.0;
};

struct ChiralMeasure {
    double beta = 2.0;
    double sigma2 = 1.0;
    double kappa = 0.25;
    double a() const;  // squared endpoints
    double b() const;
};

struct Semicircle {
    double radius = 2.0;
};

// Point masses at cell centres; cell i is [edges[i], edges[i+1]].
struct GridMeasure {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> edges;
};

using MeasureKind = std::variant<BosonicRho, BdGMeasure, ChiralMeasure, Semicircle, GridMeasure>;

struct CdfCache {
    std::vector<double> y;
    std::vector<double> F;
};

class SpectralMeasure {
public:
    explicit SpectralMeasure(MeasureKind kind);

    // weights are renormalized; edges are midpoints between nodes
    static SpectralMeasure grid(std::vector<double> nodes, std::vector<double> weights);

    const MeasureKind& kind() const { return kind_; }
    bool is_grid() const { return std::holds_alternative<GridMeasure>(kind_); }
    const GridMeasure& as_grid() const { return std::get<GridMeasure>(kind_); }
    double a_w() const { return a_; }
    double b_w() const { return b_; }
    Edge left_edge() const { return left_; }
    Edge right_edge() const { return right_; }
    std::string name() const;

    double density_at(double y) const;
    double cdf(double y) const;
    double quantile(double u) const;
    const CdfCache& cdf_cache() const { return *cache_; }

private:
    MeasureKind kind_;
    double a_ = 0.0, b_ = 0.0;
    Edge left_ = Edge::Regular, right_ = Edge::Regular;
    std::shared_ptr<const CdfCache> cache_;
    void build_cache();
};

// int f dmu; `singular` lists points (interior or endpoints) with integrable log singularities.
double integrate(const SpectralMeasure& mu, const std::function<double(double)>& f,
                 const std::vector<double>& singular = {}, const QuadOptions& opt = {});

// int log|x - y| dmu(y)
double log_potential(const SpectralMeasure& mu, double x);
// int log|x^theta - y^theta| dmu(y)
double log_potential_power(const SpectralMeasure& mu, double x, int theta);
// int [log|x-y| + log|x^theta-y^theta|] dmu(y); x must lie outside the open support
double integrate_log_kernel(const SpectralMeasure& mu, double x, int theta);

struct EmpiricalMeasure {
    std::vector<double> samples;  // sorted
    std::vector<double> edges;
    std::vector<long> counts;
};

EmpiricalMeasure make_empirical(std::vector<double> values, std::vector<double> edges = {});
EmpiricalMeasure make_empirical(std::vector<double> values, int bins);

double ks_distance(const EmpiricalMeasure& emp, const SpectralMeasure& mu);

// total variation style distance sum |m_i - mu(cell_i)| between a grid and another measure
double l1_distance(const SpectralMeasure& grid, const SpectralMeasure& mu);

void write_grid_csv(const SpectralMeasure& grid, const std::string& path);
void write_cdf_csv(const SpectralMeasure& mu, const std::string& path);
void write_density_csv(const SpectralMeasure& mu, const std::string& path, int points);

} // namespace ldp
