#pragma once

#include <complex>
#include <memory>
#include <random>
#include <vector>

namespace sleepcell::chan {

// Gamma surrogate for generalized-K composite fading, by moment matching.
struct GammaFading {
    double kappa = 1.0;
    double theta = 1.0;
};

// kappa = mc*ms / (mc + ms + 1 - mc*ms*eps), theta = omega/kappa.
// eps is the matching adjustment; eps=0 reproduces the plain moment match.
GammaFading match_generalized_k(double mc, double ms, double omega, double eps = 0.0);

double gamma_cdf(double kappa, double z);     // P(kappa, z) with closed forms
double gamma_pdf_scaled(double kappa, double scale, double x);

// ==== received power from a user's own serving disc ====
// gamma = P r^-beta zeta, r uniform-disc distance on [0,R]

class LocalPowerStat {
public:
    LocalPowerStat(double P, double R, double beta, GammaFading zeta);
    double cdf(double x) const;
    double pdf(double x) const;
    double P() const { return P_; }
    double R() const { return R_; }
    double beta() const { return beta_; }
    const GammaFading& fading() const { return zeta_; }

private:
    double P_, R_, beta_;
    GammaFading zeta_;
};

// ==== received power from an external BS at center distance D ====
// X = P rtilde^-beta chi, rtilde the annulus distance

class CrossPowerStat {
public:
    virtual ~CrossPowerStat() = default;
    virtual double cdf(double x) const = 0;
    virtual double pdf(double x) const = 0;
    virtual double mgf(double t) const = 0;                       // E[e^-tX]
    virtual std::complex<double> mgf(std::complex<double> t) const = 0;
    virtual double mean() const = 0;
    virtual double D() const = 0;
    // support scale hints for grid construction
    virtual double scale_min() const = 0;
    virtual double scale_max() const = 0;
};

struct CrossSeriesConfig {
    int max_terms = 25;       // Maclaurin index cap on n
    double tail_tol = 1e-8;   // stop once a whole n-block falls below this
    int grid_points = 2000;   // tabulation for cdf/pdf interpolation and mgf
};

// Truncated-series cross-power law. The truncation leaves a small mass
// defect (about 1% at N=25, D=2R), so all exposed statistics are divided by
// the truncated total mass; raw values stay available for the dual-route
// transform comparison.
class CrossPowerSeries : public CrossPowerStat {
public:
    CrossPowerSeries(double P, double D, double R, double beta, GammaFading chi,
                     CrossSeriesConfig cfg = {});
    double cdf(double x) const override;
    double pdf(double x) const override;
    double mgf(double t) const override;
    std::complex<double> mgf(std::complex<double> t) const override;
    double mean() const override;
    double D() const override { return D_; }
    double scale_min() const override { return smin_; }
    double scale_max() const override { return smax_; }

    double cdf_raw(double x) const;   // un-normalized truncated series
    double pdf_raw(double x) const;
    double mgf_series_raw(double t) const;   // hypergeometric route, un-normalized
    double mass() const { return mass_; }

private:
    double P_, D_, R_, beta_;
    GammaFading chi_;
    CrossSeriesConfig cfg_;
    struct Term {
        double g;
        double coef;
    };
    std::vector<Term> terms_;
    double smin_ = 0.0, smax_ = 0.0, mass_ = 1.0;
    std::vector<double> grid_, cdf_, pdf_;
    double mean_ = 0.0;

    double cross_term(double g, double c) const;
};

// Equal-width-zone approximation: an equal-weight Gamma mixture over the
// discretized disc (the approximation fixes both the grid and the weights).
class CrossPowerZones : public CrossPowerStat {
public:
    CrossPowerZones(double P, double D, double R, double beta, GammaFading chi,
                    int radial_zones = 50, int angular_intervals = 10);
    double cdf(double x) const override;
    double pdf(double x) const override;
    double mgf(double t) const override;
    std::complex<double> mgf(std::complex<double> t) const override;
    double mean() const override;
    double D() const override { return D_; }
    double scale_min() const override { return smin_; }
    double scale_max() const override { return smax_; }
    const std::vector<double>& component_scales() const { return scales_; }

private:
    double D_;
    double kappa_;
    std::vector<double> scales_;   // per-zone Gamma scale, equal weights
    double smin_ = 0.0, smax_ = 0.0;
};

enum class StatFlavor { series, zones };

std::shared_ptr<const CrossPowerStat> make_cross_stat(
    StatFlavor flavor, double P, double D, double R, double beta, GammaFading chi,
    const CrossSeriesConfig& series_cfg, int radial_zones, int angular_intervals);

// ==== sampling (Monte-Carlo plumbing) ====

// Tabulated inverse CDF of the annulus distance law, 4096 knots; sampling
// sits in the simulation hot loop, so the inverse is precomputed per (D,R).
class CrossDistanceSampler {
public:
    CrossDistanceSampler(double D, double R, int knots = 4096);
    double operator()(std::mt19937_64& rng) const;
    double quantile(double u) const;

private:
    std::vector<double> r_, F_;
};

// P r^-beta zeta with r the uniform-disc distance on [0,R]
double sample_local(const GammaFading& zeta, double P, double beta, double R,
                    std::mt19937_64& rng);

// P rtilde^-beta chi with rtilde drawn from the annulus law
double sample_cross(const CrossDistanceSampler& dist, const GammaFading& chi, double P,
                    double beta, std::mt19937_64& rng);

}  // namespace sleepcell::chan
