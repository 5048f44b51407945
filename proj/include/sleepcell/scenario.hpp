#pragma once

#include <cstdint>
#include <vector>

#include "sleepcell/channel.hpp"
#include "sleepcell/geometry.hpp"

namespace sleepcell {

enum class Scheduling { greedy, round_robin };
enum class AssociationScheme { mmap, mrsp, hybrid };

// exact: enumerate every competitor on/off vector (capped at 20 competitors);
// sampled: draw `samples` vectors from the product-Bernoulli law instead
struct EnumerationPolicy {
    bool exact = true;
    long samples = 100000;
    std::uint64_t seed = 1;
};

struct PowerModel {
    double P_static = 200.0;   // per-BS fixed draw, watts
    double P_sleep = 2.0;      // per sleeping BS, watts
    double delta_dyn = 3.77;   // load-dependent slope
};

// One fully specified network configuration. Loads and the sleep pattern are
// per-cell over layout indices; fading fits are the Gamma surrogates for the
// local (zeta) and cross (chi) links.
struct Scenario {
    geom::CellLayout layout;
    std::vector<int> loads;
    geom::SleepPattern pattern;
    Scheduling scheduling = Scheduling::greedy;
    AssociationScheme association = AssociationScheme::mmap;
    chan::GammaFading zeta{0.5, 1.0};
    chan::GammaFading chi{2.0, 1.0};
    double P = 1.0;          // per-channel transmit power, watts
    double beta = 2.6;       // path-loss exponent
    double alpha = 1.0;      // zoom factor, >= 1
    double sigma2 = 1e-16;   // noise power
    double Q = 1.0;          // outage threshold on the interference/signal ratio
    geom::Discretization disc;
    chan::StatFlavor flavor = chan::StatFlavor::series;
    chan::CrossSeriesConfig series;
    EnumerationPolicy enumeration;
    PowerModel power;
};

}  // namespace sleepcell
