#pragma once

#include <string>

#include "sleepcell/montecarlo.hpp"
#include "sleepcell/scenario.hpp"

namespace sleepcell::io {

// One parsed configuration file: the network scenario plus the simulation
// settings that ride along with it. u_th records the sleep threshold when the
// pattern came from the threshold rule; explicit_sleep marks configurations
// that pinned the sleeping set by hand (sweeps over the threshold reject
// those).
struct ScenarioFile {
    Scenario scenario;
    mc::SimConfig sim;
    int u_th = 2;
    bool explicit_sleep = false;
};

// Sectioned key=value text:
//   [layout]     tiers, radius
//   [loads]      default, cell<N>
//   [fading]     zeta_shape, zeta_scale, chi_shape, chi_scale, beta
//   [power]      transmit, alpha, static, sleep, delta_dyn, noise
//   [scheme]     scheduling, association, u_th, sleeping, q
//   [numerics]   flavor, series_max_terms, series_tail_tol, series_grid_points,
//                radial_zones, angular_intervals, enumeration, enum_samples,
//                enum_seed
//   [simulation] iterations, seed, threads
// Full-line comments start with '#' or ';'. Unknown sections, unknown keys
// and duplicate keys are parse errors; every value must consume its whole
// token. An empty document yields the documented default scenario.
//
// Parse errors throw std::runtime_error as "name:line: message"; validation
// problems are collected and thrown together, one violation per line.
ScenarioFile parse_scenario_text(const std::string& text,
                                 const std::string& name = "<string>");

ScenarioFile load_scenario_file(const std::string& path);

}  // namespace sleepcell::io
