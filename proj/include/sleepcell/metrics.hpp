#pragma once

#include <cstddef>

#include "sleepcell/association.hpp"
#include "sleepcell/scenario.hpp"
#include "sleepcell/sigint.hpp"

namespace sleepcell::met {

// ==== link-level figures ====

// mean log(1 + S / (I + noise)) in nats per channel use, from the two
// transforms; empty slots (the atom of S at zero) contribute nothing.
// noise == 0 is allowed only when interference is present, otherwise the
// mean rate has no finite value.
double spectral_efficiency(const sig::SignalPowerStat& S,
                           const sig::InterferenceStat& I, double noise);

inline double nats_to_bits(double nats) { return nats / 0.693147180559945309417; }

// P(S < Q * I), noise ignored; an empty slot always counts as an outage, so
// without interference the value is exactly 1 - access. Q must be positive.
double outage_probability(const sig::SignalPowerStat& S,
                          const sig::InterferenceStat& I, double Q);

// ==== per-user and network aggregates ====

// served-pair weighted mean rate of one user of sleeping cell j, nats.
// Single-target association contributes its one pair; strongest-candidate
// association averages over the candidate cells with the association weights.
double user_spectral_efficiency(const assoc::StatBank& bank,
                                const assoc::AccessReport& rep, std::size_t j,
                                sig::ZoomConvention conv = sig::ZoomConvention::per_cell);

double user_outage(const assoc::StatBank& bank, const assoc::AccessReport& rep,
                   std::size_t j, double Q,
                   sig::ZoomConvention conv = sig::ZoomConvention::per_cell);

// sum of user rates over every user of every sleeping cell, nats
double sleeping_aggregate_rate(const assoc::StatBank& bank,
                               const assoc::AccessReport& rep,
                               sig::ZoomConvention conv = sig::ZoomConvention::per_cell);

// expected number of simultaneously zooming base stations
double expected_zoom_count(const assoc::StatBank& bank, const assoc::AccessReport& rep,
                           sig::ZoomConvention conv = sig::ZoomConvention::per_cell);

// ==== power model ====

struct PowerReport {
    double p_total = 0.0;  // every BS awake, no zooming
    double p_base = 0.0;   // sleep pattern applied, zooming off
    double p_mean = 0.0;   // plus the expected zooming surcharge
};

// n_zoom is the (expected or realized) count of zooming base stations
PowerReport network_power(const Scenario& scn, double n_zoom);

// rate per watt; power must be positive
double energy_efficiency(double rate_bits, double power_watts);

}  // namespace sleepcell::met
