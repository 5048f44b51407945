#pragma once

#include <cstddef>
#include <vector>

namespace sleepcell::geom {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Cell {
    Point center;
    int tier = 0;
};

// Hexagonal lattice of circular cells of radius R; adjacent centers 2R apart.
// Index 0 is the central cell; tier t contributes 6t cells appended in a
// fixed ring-walk order, so tiers=2 yields 19 cells with stable indices.
struct CellLayout {
    std::vector<Cell> cells;
    double R = 0.0;

    std::size_t size() const { return cells.size(); }
};

CellLayout build_tier_layout(int tiers, double R);

double inter_bs_distance(const CellLayout& layout, std::size_t j, std::size_t k);

// distance from a cell-local polar point to another cell's center
double cosine_law_distance(double r_y, double theta_w, double D_jk, double theta_jk);

// angle of the segment from cell j's center to cell k's center
double center_angle(const CellLayout& layout, std::size_t j, std::size_t k);

// pdf of a uniform user's distance to its own BS, 2r/R^2 on [0,R]
double local_distance_pdf(double r, double R);

// pdf of a uniform user's distance to a BS D away (D > R), support [D-R, D+R]
double cross_distance_pdf(double r_tilde, double D, double R);

struct Discretization {
    int radial_zones = 50;
    int angular_intervals = 10;
};

struct ZonePoint {
    double r = 0.0;
    double theta = 0.0;
    double prob = 0.0;
};

// Equal-width rings at radial midpoints with uniform zone probabilities
// 1/(Y*W). This is the approximation's own construction; the probability
// assignment is part of the contract even though equal-width rings do not
// carry equal area.
std::vector<ZonePoint> discretize_cell(int radial_zones, int angular_intervals, double R);

inline std::vector<ZonePoint> discretize_cell(const Discretization& d, double R) {
    return discretize_cell(d.radial_zones, d.angular_intervals, R);
}

struct SleepPattern {
    std::vector<std::size_t> sleeping;
    std::vector<std::size_t> active;
};

// threshold rule: cell l sleeps iff U_l <= U_th
SleepPattern select_sleep_pattern(const std::vector<int>& loads, int u_th);

}  // namespace sleepcell::geom
