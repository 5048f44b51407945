#include "sleepcell/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "sleepcell/mathkit.hpp"

namespace sleepcell::met {

namespace {

// integrate f(e^u) over u in [lo, hi] in panels no wider than 2, so the
// adaptive rule never has to bridge many decades in one call
template <class F>
double log_axis_integral(const F& f, double lo, double hi, double abs_tol,
                         double rel_tol) {
    const int panels = std::max(8, int(std::ceil((hi - lo) / 2.0)));
    const double w = (hi - lo) / panels;
    num::Accum acc;
    for (int i = 0; i < panels; ++i)
        acc.add(num::integrate(f, lo + i * w, lo + (i + 1) * w, abs_tol, rel_tol).value);
    return acc.value();
}

}  // namespace

double spectral_efficiency(const sig::SignalPowerStat& S,
                           const sig::InterferenceStat& I, double noise) {
    if (noise < 0.0)
        throw std::invalid_argument("spectral_efficiency: noise must be >= 0");
    if (noise == 0.0 && I.terms().empty())
        throw std::invalid_argument(
            "spectral_efficiency: an isolated noise-free link has no finite mean rate");
    const double p = S.access();
    if (p <= 0.0)
        return 0.0;
    const double mc = S.mean_cond();
    if (!(mc > 0.0))
        return 0.0;

    // below lo the integrand is ~ t * mean and above hi either the noise
    // factor or the interference transform has died off
    const double lo = -std::log(mc) - 26.0;
    double hi = -std::log(mc) + 30.0;
    if (noise > 0.0)
        hi = std::max(hi, std::log(1.0 / noise) + 3.0);

    auto g = [&](double u) {
        const double t = std::exp(u);
        return I.mgf(t) * (1.0 - S.mgf(t)) * std::exp(-noise * t);
    };
    return std::max(0.0, log_axis_integral(g, lo, hi, 1e-12, 1e-9));
}

double outage_probability(const sig::SignalPowerStat& S,
                          const sig::InterferenceStat& I, double Q) {
    if (!(Q > 0.0))
        throw std::invalid_argument("outage_probability: Q must be > 0");
    const double p = S.access();
    if (p <= 0.0)
        return 1.0;
    if (I.terms().empty())
        return 1.0 - p;

    // inversion of the characteristic functions of S - Q*I at zero; the
    // 1/omega kernel is absorbed by the log axis
    const double mS = S.mean_cond();
    const double mQI = Q * I.mean();
    const double lo = std::log(1e-9 / std::max(mS, mQI));
    const double hi = std::log(400.0 / std::min(mS, mQI));
    auto g = [&](double u) {
        const double om = std::exp(u);
        const std::complex<double> phiS = S.mgf(std::complex<double>(0.0, -om));
        const std::complex<double> phiI = I.mgf(std::complex<double>(0.0, Q * om));
        return (phiS * phiI).imag();
    };
    // per-panel 3e-7 absolute leaves the summed inversion error near 1e-6,
    // well under the accuracy the oscillatory core can support anyway
    const double v = log_axis_integral(g, lo, hi, 3e-7, 1e-6);
    return std::clamp(0.5 - v / num::kPi, 0.0, 1.0);
}

double user_spectral_efficiency(const assoc::StatBank& bank,
                                const assoc::AccessReport& rep, std::size_t j,
                                sig::ZoomConvention conv) {
    const auto pairs = sig::served_pairs(bank, rep, j);
    num::Accum acc;
    for (const auto& pr : pairs) {
        if (pr.weight <= 0.0)
            continue;
        const auto I = sig::interference_stat(bank, rep, j, pr.serving, conv);
        acc.add(pr.weight * spectral_efficiency(pr.signal, I, bank.scenario().sigma2));
    }
    return acc.value();
}

double user_outage(const assoc::StatBank& bank, const assoc::AccessReport& rep,
                   std::size_t j, double Q, sig::ZoomConvention conv) {
    const auto pairs = sig::served_pairs(bank, rep, j);
    num::Accum acc;
    for (const auto& pr : pairs) {
        if (pr.weight <= 0.0)
            continue;
        const auto I = sig::interference_stat(bank, rep, j, pr.serving, conv);
        acc.add(pr.weight * outage_probability(pr.signal, I, Q));
    }
    return acc.value();
}

double sleeping_aggregate_rate(const assoc::StatBank& bank,
                               const assoc::AccessReport& rep,
                               sig::ZoomConvention conv) {
    num::Accum acc;
    for (std::size_t cell : rep.sleeping) {
        const int users = bank.scenario().loads.at(cell);
        if (users <= 0)
            continue;
        acc.add(users * user_spectral_efficiency(bank, rep, cell, conv));
    }
    return acc.value();
}

double expected_zoom_count(const assoc::StatBank& bank, const assoc::AccessReport& rep,
                           sig::ZoomConvention conv) {
    num::Accum acc;
    for (std::size_t c = 0; c < rep.active.size(); ++c)
        acc.add(sig::zoom_probability(bank, rep, c, conv));
    return acc.value();
}

PowerReport network_power(const Scenario& scn, double n_zoom) {
    const double per_bs = scn.power.delta_dyn * scn.P + scn.power.P_static;
    const double L = double(scn.layout.cells.size());
    const double Ns = double(scn.pattern.sleeping.size());
    PowerReport r;
    r.p_total = L * per_bs;
    r.p_base = (L - Ns) * per_bs + Ns * scn.power.P_sleep;
    r.p_mean = r.p_base + n_zoom * scn.power.delta_dyn * scn.P * (scn.alpha - 1.0);
    return r;
}

double energy_efficiency(double rate_bits, double power_watts) {
    if (!(power_watts > 0.0))
        throw std::invalid_argument("energy_efficiency: power must be positive");
    return rate_bits / power_watts;
}

}  // namespace sleepcell::met
