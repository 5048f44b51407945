#include "sleepcell/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sleepcell/geometry.hpp"
#include "sleepcell/mathkit.hpp"

namespace sleepcell::chan {

using num::Accum;
using num::gamma_p;
using num::integrate;

GammaFading match_generalized_k(double mc, double ms, double omega, double eps) {
    if (!(mc > 0.0) || !(ms > 0.0) || !(omega > 0.0))
        throw std::invalid_argument("match_generalized_k: positive parameters required");
    const double denom = mc + ms + 1.0 - mc * ms * eps;
    if (!(denom > 0.0))
        throw std::invalid_argument("match_generalized_k: adjustment too large");
    const double kappa = mc * ms / denom;
    return {kappa, omega / kappa};
}

double gamma_cdf(double kappa, double z) {
    if (z <= 0.0)
        return 0.0;
    // closed forms for the shapes the fading surrogates actually take
    if (kappa == 0.5)
        return std::erf(std::sqrt(z));
    if (kappa == 1.0)
        return -std::expm1(-z);
    if (kappa == 1.5)
        return std::erf(std::sqrt(z)) -
               2.0 * std::sqrt(z / num::kPi) * std::exp(-z);
    if (kappa == 2.0)
        return -std::expm1(-z) - z * std::exp(-z);
    if (kappa == 3.0)
        return 1.0 - std::exp(-z) * (1.0 + z + 0.5 * z * z);
    return gamma_p(kappa, z);
}

double gamma_pdf_scaled(double kappa, double scale, double x) {
    if (x <= 0.0)
        return 0.0;
    const double z = x / scale;
    return std::exp((kappa - 1.0) * std::log(z) - z - std::lgamma(kappa)) / scale;
}

// ==== local power ====

LocalPowerStat::LocalPowerStat(double P, double R, double beta, GammaFading zeta)
    : P_(P), R_(R), beta_(beta), zeta_(zeta) {
    if (!(P > 0.0) || !(R > 0.0) || !(beta >= 2.0))
        throw std::invalid_argument("LocalPowerStat: P > 0, R > 0, beta >= 2 required");
}

double LocalPowerStat::cdf(double x) const {
    if (x <= 0.0)
        return 0.0;
    const double b = std::pow(R_, beta_) * x / (P_ * zeta_.theta);
    const double a2 = zeta_.kappa + 2.0 / beta_;
    const double ratio = std::exp(std::lgamma(a2) - std::lgamma(zeta_.kappa));
    const double corr =
        std::pow(b, -2.0 / beta_) * gamma_p(a2, b) * ratio;
    return std::clamp(gamma_cdf(zeta_.kappa, b) - corr, 0.0, 1.0);
}

double LocalPowerStat::pdf(double x) const {
    if (x <= 0.0)
        return 0.0;
    const double b = std::pow(R_, beta_) * x / (P_ * zeta_.theta);
    const double a2 = zeta_.kappa + 2.0 / beta_;
    const double ratio = std::exp(std::lgamma(a2) - std::lgamma(zeta_.kappa));
    return (2.0 / (beta_ * x)) * std::pow(b, -2.0 / beta_) * gamma_p(a2, b) * ratio;
}

// ==== series cross power ====

CrossPowerSeries::CrossPowerSeries(double P, double D, double R, double beta,
                                   GammaFading chi, CrossSeriesConfig cfg)
    : P_(P), D_(D), R_(R), beta_(beta), chi_(chi), cfg_(cfg) {
    if (!(D > R) || !(beta >= 2.0))
        throw std::invalid_argument("CrossPowerSeries: D > R and beta >= 2 required");
    const double A = D - R, B = D + R;
    smin_ = chi_.theta * P_ * std::pow(B, -beta_);
    smax_ = chi_.theta * P_ * std::pow(A, -beta_);

    // coefficient assembly in logs; the paired powers keep every factor
    // representable out to n ~ 40
    const double lnRing = std::log((D * D - R * R) / (2.0 * D));
    const double ln2D = std::log(2.0 * D);
    int quiet_blocks = 0;
    for (int n = 0; n < cfg_.max_terms; ++n) {
        const double lncn = std::lgamma(n + 0.5) - 1.5 * std::log(num::kPi) -
                            std::log(2.0 * n + 1.0) - std::lgamma(n + 1.0);
        double block_mass = 0.0;
        for (int m = 0; m <= 2 * n + 1; ++m) {
            const double g = 1.0 - 2.0 * n + 2.0 * m;
            const double lnC = std::log(2.0) + num::log_binom(2 * n + 1, m) +
                               (2.0 * n + 1.0 - m) * lnRing - m * ln2D + lncn -
                               2.0 * std::log(R);
            const double C = std::exp(lnC);
            terms_.push_back({g, C});
            // contribution of this term to total mass (x -> inf limit)
            block_mass += C * (std::pow(B, g) - std::pow(A, g)) / g;
        }
        if (std::abs(block_mass) < cfg_.tail_tol) {
            if (++quiet_blocks >= 2) break;
        } else {
            quiet_blocks = 0;
        }
    }

    mass_ = cdf_raw(smax_ * 1e8);
    if (!(mass_ > 0.5) || !std::isfinite(mass_))
        throw std::runtime_error("CrossPowerSeries: series mass degenerate");

    const int npts = std::max(cfg_.grid_points, 64);
    grid_.resize(npts);
    cdf_.resize(npts);
    pdf_.resize(npts);
    const double lo = std::log(smin_) - 16.0;
    const double hi = std::log(smax_) + 7.0;
    double runmax = 0.0;
    for (int i = 0; i < npts; ++i) {
        const double x = std::exp(lo + (hi - lo) * i / (npts - 1));
        grid_[i] = x;
        runmax = std::max(runmax, std::clamp(cdf_raw(x) / mass_, 0.0, 1.0));
        cdf_[i] = runmax;
        pdf_[i] = std::max(pdf_raw(x) / mass_, 0.0);
    }

    mean_ = chi_.kappa * chi_.theta * P_ *
            integrate(
                [&](double r) {
                    return std::pow(r, -beta_) * geom::cross_distance_pdf(r, D_, R_);
                },
                A, B, 1e-14, 1e-12)
                .value;
}

double CrossPowerSeries::cross_term(double g, double c) const {
    const double A = D_ - R_, B = D_ + R_;
    const double a = chi_.kappa + g / beta_;
    const double b1 = c * std::pow(A, beta_);
    const double b2 = c * std::pow(B, beta_);
    return std::pow(B, g) * num::gamma_bracket(a, b1, b2, chi_.kappa);
}

double CrossPowerSeries::cdf_raw(double x) const {
    if (x <= 0.0)
        return 0.0;
    const double A = D_ - R_, B = D_ + R_;
    const double c = x / (P_ * chi_.theta);
    const double b1 = c * std::pow(A, beta_);
    const double b2 = c * std::pow(B, beta_);
    const double pb1 = gamma_cdf(chi_.kappa, b1);
    const double pb2 = gamma_cdf(chi_.kappa, b2);
    const double invGk = std::exp(-std::lgamma(chi_.kappa));
    Accum acc;
    acc.add((B * B * pb2 - A * A * pb1) / (2.0 * R_ * R_));
    acc.add(-cross_term(2.0, c) * invGk / (2.0 * R_ * R_));
    for (const auto& tm : terms_) {
        const double bracket = (std::pow(B, tm.g) * pb2 - std::pow(A, tm.g) * pb1) / tm.g -
                               cross_term(tm.g, c) * invGk / tm.g;
        acc.add(-tm.coef * bracket);
    }
    return acc.value();
}

double CrossPowerSeries::pdf_raw(double x) const {
    if (x <= 0.0)
        return 0.0;
    const double c = x / (P_ * chi_.theta);
    const double invGk = std::exp(-std::lgamma(chi_.kappa));
    Accum acc;
    acc.add(cross_term(2.0, c) / (R_ * R_));
    for (const auto& tm : terms_)
        acc.add(-tm.coef * cross_term(tm.g, c));
    return acc.value() * invGk / (beta_ * x);
}

double CrossPowerSeries::mgf_series_raw(double t) const {
    const double A = D_ - R_, B = D_ + R_;
    const double ct = chi_.theta * P_ * t;
    auto term = [&](double g) {
        auto fb = num::hyp2f1_ratio(chi_.kappa, g / beta_, ct * std::pow(B, -beta_));
        auto fa = num::hyp2f1_ratio(chi_.kappa, g / beta_, ct * std::pow(A, -beta_));
        if (fb && fa)
            return (std::pow(B, g) * *fb - std::pow(A, g) * *fa) / g;
        // pole or slow series: integrate the underlying radial form directly
        return integrate(
                   [&](double v) {
                       const double r = std::exp(v);
                       return std::pow(1.0 + ct * std::pow(r, -beta_), -chi_.kappa) *
                              std::exp(g * v);
                   },
                   std::log(A), std::log(B), 1e-300, 1e-12)
            .value;
    };
    Accum acc;
    acc.add(term(2.0) / (R_ * R_));
    for (const auto& tm : terms_)
        acc.add(-tm.coef * term(tm.g));
    return acc.value();
}

namespace {
double interp_sorted(const std::vector<double>& xs, const std::vector<double>& ys,
                     double x, double below, double above) {
    if (x <= xs.front())
        return below;
    if (x >= xs.back())
        return above;
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + w * (ys[i + 1] - ys[i]);
}
}  // namespace

double CrossPowerSeries::cdf(double x) const {
    return interp_sorted(grid_, cdf_, x, 0.0, 1.0);
}

double CrossPowerSeries::pdf(double x) const {
    return interp_sorted(grid_, pdf_, x, 0.0, 0.0);
}

double CrossPowerSeries::mgf(double t) const {
    return num::mgf_from_cdf(grid_, cdf_, t);
}

std::complex<double> CrossPowerSeries::mgf(std::complex<double> t) const {
    return num::mgf_from_cdf(grid_, cdf_, t);
}

double CrossPowerSeries::mean() const { return mean_; }

// ==== zone-grid cross power ====

CrossPowerZones::CrossPowerZones(double P, double D, double R, double beta,
                                 GammaFading chi, int radial_zones,
                                 int angular_intervals)
    : D_(D), kappa_(chi.kappa) {
    if (!(D > R))
        throw std::invalid_argument("CrossPowerZones: D > R required");
    auto grid = geom::discretize_cell(radial_zones, angular_intervals, R);
    scales_.reserve(grid.size());
    for (const auto& z : grid) {
        // rotational symmetry of the angular sweep makes the center angle moot
        const double rt = geom::cosine_law_distance(z.r, z.theta, D, 0.0);
        scales_.push_back(chi.theta * P * std::pow(rt, -beta));
    }
    auto [mn, mx] = std::minmax_element(scales_.begin(), scales_.end());
    smin_ = *mn;
    smax_ = *mx;
}

double CrossPowerZones::cdf(double x) const {
    if (x <= 0.0)
        return 0.0;
    Accum acc;
    for (double s : scales_)
        acc.add(gamma_cdf(kappa_, x / s));
    return acc.value() / static_cast<double>(scales_.size());
}

double CrossPowerZones::pdf(double x) const {
    if (x <= 0.0)
        return 0.0;
    const double lg = std::lgamma(kappa_);
    Accum acc;
    for (double s : scales_) {
        const double z = x / s;
        acc.add(std::exp((kappa_ - 1.0) * std::log(z) - z - lg) / s);
    }
    return acc.value() / static_cast<double>(scales_.size());
}

double CrossPowerZones::mgf(double t) const {
    Accum acc;
    for (double s : scales_)
        acc.add(std::pow(1.0 + t * s, -kappa_));
    return acc.value() / static_cast<double>(scales_.size());
}

std::complex<double> CrossPowerZones::mgf(std::complex<double> t) const {
    std::complex<double> sum = 0.0;
    for (double s : scales_)
        sum += std::pow(1.0 + t * s, -kappa_);
    return sum / static_cast<double>(scales_.size());
}

double CrossPowerZones::mean() const {
    double m = 0.0;
    for (double s : scales_) m += s;
    return kappa_ * m / static_cast<double>(scales_.size());
}

std::shared_ptr<const CrossPowerStat> make_cross_stat(
    StatFlavor flavor, double P, double D, double R, double beta, GammaFading chi,
    const CrossSeriesConfig& series_cfg, int radial_zones, int angular_intervals) {
    if (flavor == StatFlavor::series)
        return std::make_shared<CrossPowerSeries>(P, D, R, beta, chi, series_cfg);
    return std::make_shared<CrossPowerZones>(P, D, R, beta, chi, radial_zones,
                                             angular_intervals);
}

// ==== sampling ====

CrossDistanceSampler::CrossDistanceSampler(double D, double R, int knots) {
    if (!(D > R) || !(R > 0.0) || knots < 8)
        throw std::invalid_argument("invalid annulus sampler parameters");
    const double A = D - R, B = D + R;
    r_.resize(knots);
    F_.resize(knots);
    F_[0] = 0.0;
    r_[0] = A;
    for (int i = 1; i < knots; ++i) {
        r_[i] = A + (B - A) * i / (knots - 1);
        F_[i] = F_[i - 1] +
                num::integrate(
                    [&](double r) { return geom::cross_distance_pdf(r, D, R); },
                    r_[i - 1], r_[i], 1e-13, 1e-10)
                    .value;
    }
    const double total = F_.back();
    for (double& f : F_)
        f /= total;
}

double CrossDistanceSampler::quantile(double u) const {
    if (u <= 0.0)
        return r_.front();
    if (u >= 1.0)
        return r_.back();
    const auto it = std::upper_bound(F_.begin(), F_.end(), u);
    const std::size_t i = it - F_.begin();
    const double df = F_[i] - F_[i - 1];
    const double w = df > 0.0 ? (u - F_[i - 1]) / df : 0.0;
    return r_[i - 1] + (r_[i] - r_[i - 1]) * w;
}

double CrossDistanceSampler::operator()(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    return quantile(u01(rng));
}

double sample_local(const GammaFading& zeta, double P, double beta, double R,
                    std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double r = R * std::sqrt(u01(rng));
    std::gamma_distribution<double> gam(zeta.kappa, zeta.theta);
    return P * std::pow(r, -beta) * gam(rng);
}

double sample_cross(const CrossDistanceSampler& dist, const GammaFading& chi, double P,
                    double beta, std::mt19937_64& rng) {
    const double r = dist(rng);
    std::gamma_distribution<double> gam(chi.kappa, chi.theta);
    return P * std::pow(r, -beta) * gam(rng);
}

}  // namespace sleepcell::chan
