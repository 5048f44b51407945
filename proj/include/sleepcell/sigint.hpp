#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "sleepcell/association.hpp"

namespace sleepcell::sig {

// ==== served-signal law ====

// Received-power law of a served sleeping-cell user: an atom of mass
// (1 - access) at zero plus access times a continuous part, tabulated as a
// piecewise-linear CDF on an ascending grid. Construction applies the zoom
// factor by scaling the grid, so every query below is already in zoomed
// units. Mass the tabulation does not reach by its last knot is treated as
// sitting at that knot.
class SignalPowerStat {
public:
    SignalPowerStat() = default;
    SignalPowerStat(std::vector<double> grid, std::vector<double> cond_cdf,
                    double access, double alpha = 1.0);

    double access() const { return p_; }
    double cdf(double s) const;       // full law, atom included
    double mgf(double t) const;       // E[e^-tS]
    std::complex<double> mgf(std::complex<double> t) const;
    double mean() const { return p_ * mean_cond_; }
    double mean_cond() const { return mean_cond_; }
    // inverse-CDF draw; returns 0 when the access coin fails
    double sample(std::mt19937_64& rng) const;

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& cond_cdf() const { return F_; }

private:
    std::vector<double> grid_;
    std::vector<double> F_;
    double p_ = 0.0;
    double mean_cond_ = 0.0;
};

// ==== per-scheme constructors ====

// Minimum-load association: the serving cell is fixed by the access report.
SignalPowerStat signal_stat_greedy_mmap(const assoc::StatBank& bank,
                                        const assoc::AccessReport& rep, std::size_t j);
SignalPowerStat signal_stat_rr_mmap(const assoc::StatBank& bank,
                                    const assoc::AccessReport& rep, std::size_t j);

// Strongest-candidate association: one law per candidate serving cell,
// conditional on that cell winning the association.
SignalPowerStat signal_stat_greedy_mrsp(const assoc::StatBank& bank,
                                        const assoc::AccessReport& rep, std::size_t j,
                                        std::size_t kstar);
SignalPowerStat signal_stat_rr_mrsp(const assoc::StatBank& bank,
                                    const assoc::AccessReport& rep, std::size_t j,
                                    std::size_t kstar);

// One (user cell, serving cell) configuration with its association weight
// and served-signal law. Weights over a user's pairs sum to 1.
struct ServedPair {
    std::size_t cell = 0;
    std::size_t serving = 0;
    double weight = 1.0;
    SignalPowerStat signal;
};

// all serving configurations for a user of sleeping cell j under the
// scenario's scheme pair; throws for the hybrid rule (simulation only)
std::vector<ServedPair> served_pairs(const assoc::StatBank& bank,
                                     const assoc::AccessReport& rep, std::size_t j);

// ==== zooming ====

// Whether a shared cell's several attached users count once or per head in
// the zoom sums; cell-level counting follows the closed-form convention.
enum class ZoomConvention { per_cell, per_user };

// Probability that active cell rep.active[col] raises its power to serve
// some sleeping user. Sums the scheme's exact access probabilities over the
// attached sleeping cells, clamped to [0,1]; `clamped` reports when the raw
// sum spilled over. exclude_cell drops one user of that cell from the count
// (the user of interest, already served elsewhere); npos keeps everyone.
double zoom_probability(const assoc::StatBank& bank, const assoc::AccessReport& rep,
                        std::size_t col, ZoomConvention conv = ZoomConvention::per_cell,
                        std::size_t exclude_cell = assoc::AccessReport::npos,
                        bool* clamped = nullptr);

// ==== cumulative interference ====

// Sum of independent cross powers from every active cell except the serving
// one, each zooming independently with its own probability. The Bernoulli
// mixture over zoom patterns factors per cell, so the transform is a product
// of two-term mixtures. Holds pointers into the owning StatBank.
class InterferenceStat {
public:
    struct Term {
        const chan::CrossPowerStat* stat;
        double p_zoom;
    };

    InterferenceStat() = default;
    InterferenceStat(std::vector<Term> terms, double alpha);

    double mgf(double t) const;
    std::complex<double> mgf(std::complex<double> t) const;
    double mean() const;
    const std::vector<Term>& terms() const { return terms_; }
    double alpha() const { return alpha_; }

private:
    std::vector<Term> terms_;
    double alpha_ = 1.0;
};

InterferenceStat interference_stat(const assoc::StatBank& bank,
                                   const assoc::AccessReport& rep, std::size_t j,
                                   std::size_t serving,
                                   ZoomConvention conv = ZoomConvention::per_cell);

}  // namespace sleepcell::sig
