#pragma once

#include <cstdint>
#include <vector>

#include "sleepcell/association.hpp"

namespace sleepcell::mc {

struct SimConfig {
    long iterations = 100000;
    std::uint64_t seed = 1;
    int threads = 1;
    bool collect_rates = true;  // SINR-derived outputs need per-winner interference draws
    bool collect_cdf = true;    // marked-user served-power histograms on the fixed grid
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Empirical counterparts of the analytic quantities, averaged over all
// iterations. Rows follow pattern.sleeping and columns pattern.active, same
// as the access report. The "marked" user of a row is user 0 of that cell:
// per-user frequencies and rates are collected for it alone, while cell and
// network sums run over every user. Rates are in nats.
struct SimResult {
    std::vector<std::size_t> sleeping;
    std::vector<std::size_t> active;

    std::vector<Estimate> access;                     // marked user wins its contest
    std::vector<std::vector<double>> chose;           // association frequency per column
    std::vector<std::vector<Estimate>> access_given;  // wins / times associated there

    std::vector<Estimate> user_rate;    // marked ln(1+SINR), zero when unserved
    std::vector<Estimate> user_outage;  // unserved, or Q*I > S while served
    Estimate sleeping_rate;             // summed over every served sleeping user
    Estimate network_rate;              // summed over every served channel

    std::vector<Estimate> zoom_marked;  // column serves the marked user of some cell
    std::vector<Estimate> zoom_any;     // column serves any sleeping user
    Estimate n_zoom;                    // zooming-BS count per iteration
    Estimate power;                     // realized network draw, watts
    double energy_efficiency = 0.0;     // mean bits/s/Hz over mean watts

    std::vector<double> cdf_grid;          // fixed log grid, scenario-derived
    std::vector<std::vector<double>> cdf;  // marked served power per row, atom included

    long iterations = 0;
    std::uint64_t seed = 0;
};

// Per-iteration system simulation. Every user draws one position and
// independent fading per link; sleeping users associate (minimum-load cells
// come from the load-based table computed once up front, strongest-candidate
// and hybrid rules use the realized candidate powers); each active BS
// schedules one contender (greedy by instantaneous power with lowest-index
// tie handling, round robin uniformly); BSs whose winner is a sleeping user
// zoom, and winners' SINRs are evaluated with the zoom-scaled powers.
//
// Deterministic for fixed (scenario, config) independent of thread count:
// iterations are split into fixed-size chunks, each iteration reseeds its
// own generator from (seed, iteration index), and chunk partials merge in
// index order.
SimResult run(const assoc::StatBank& bank, const SimConfig& cfg = {});

}  // namespace sleepcell::mc
