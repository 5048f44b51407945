#include "sleepcell/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "sleepcell/mathkit.hpp"

namespace sleepcell::geom {

CellLayout build_tier_layout(int tiers, double R) {
    if (tiers < 0 || R <= 0.0)
        throw std::invalid_argument("build_tier_layout: tiers >= 0 and R > 0 required");
    CellLayout out;
    out.R = R;
    out.cells.push_back({{0.0, 0.0}, 0});
    const double step = 2.0 * R;
    double dx[6], dy[6];
    for (int i = 0; i < 6; ++i) {
        dx[i] = step * std::cos(i * num::kPi / 3.0);
        dy[i] = step * std::sin(i * num::kPi / 3.0);
    }
    for (int t = 1; t <= tiers; ++t) {
        // start on the positive x axis and walk counterclockwise, so tier-t
        // cells appear in increasing-angle order with stable indices
        double px = step * t, py = 0.0;
        for (int side = 0; side < 6; ++side) {
            int d = (side + 2) % 6;
            for (int s = 0; s < t; ++s) {
                out.cells.push_back({{px, py}, t});
                px += dx[d];
                py += dy[d];
            }
        }
    }
    return out;
}

double inter_bs_distance(const CellLayout& layout, std::size_t j, std::size_t k) {
    if (j >= layout.size() || k >= layout.size())
        throw std::out_of_range("inter_bs_distance: cell index out of range");
    if (j == k)
        throw std::invalid_argument("inter_bs_distance: j != k required");
    const Point& a = layout.cells[j].center;
    const Point& b = layout.cells[k].center;
    return std::hypot(a.x - b.x, a.y - b.y);
}

double cosine_law_distance(double r_y, double theta_w, double D_jk, double theta_jk) {
    double d2 = r_y * r_y + D_jk * D_jk - 2.0 * r_y * D_jk * std::cos(theta_jk - theta_w);
    return std::sqrt(std::max(d2, 0.0));
}

double center_angle(const CellLayout& layout, std::size_t j, std::size_t k) {
    const Point& a = layout.cells[j].center;
    const Point& b = layout.cells[k].center;
    return std::atan2(b.y - a.y, b.x - a.x);
}

double local_distance_pdf(double r, double R) {
    if (r < 0.0 || r > R)
        throw std::domain_error("local_distance_pdf: r outside [0,R]");
    return 2.0 * r / (R * R);
}

double cross_distance_pdf(double r_tilde, double D, double R) {
    if (!(D > R))
        throw std::domain_error("cross_distance_pdf: D > R required");
    if (r_tilde < D - R || r_tilde > D + R)
        throw std::domain_error("cross_distance_pdf: r outside [D-R, D+R]");
    double arg = (D * D + r_tilde * r_tilde - R * R) / (2.0 * r_tilde * D);
    arg = std::min(1.0, std::max(-1.0, arg));
    return r_tilde / (R * R) -
           (2.0 * r_tilde / (num::kPi * R * R)) * std::asin(arg);
}

std::vector<ZonePoint> discretize_cell(int radial_zones, int angular_intervals, double R) {
    if (radial_zones < 1 || angular_intervals < 1)
        throw std::invalid_argument("discretize_cell: counts >= 1 required");
    std::vector<ZonePoint> out;
    out.reserve(static_cast<std::size_t>(radial_zones) * angular_intervals);
    const double prob = 1.0 / (static_cast<double>(radial_zones) * angular_intervals);
    for (int y = 1; y <= radial_zones; ++y) {
        double r = (y - 0.5) * R / radial_zones;
        for (int w = 1; w <= angular_intervals; ++w) {
            double th = (w - 0.5) * 2.0 * num::kPi / angular_intervals;
            out.push_back({r, th, prob});
        }
    }
    return out;
}

SleepPattern select_sleep_pattern(const std::vector<int>& loads, int u_th) {
    SleepPattern out;
    for (std::size_t l = 0; l < loads.size(); ++l) {
        if (loads[l] <= u_th)
            out.sleeping.push_back(l);
        else
            out.active.push_back(l);
    }
    if (out.active.empty())
        throw std::runtime_error("select_sleep_pattern: every cell would sleep");
    return out;
}

}  // namespace sleepcell::geom
