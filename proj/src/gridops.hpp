#pragma once

// Internal helpers shared by the association and signal-statistics
// translation units: log-spaced evaluation grids over power statistics and
// the small bookkeeping around them. Not part of the public surface.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "sleepcell/channel.hpp"

namespace sleepcell::detail {

inline double ipow(double v, int n) {
    double acc = 1.0;
    for (double b = v; n > 0; n >>= 1, b *= b)
        if (n & 1)
            acc *= b;
    return acc;
}

// log-spaced abscissas spanning every stat's tabulation range, padded in log
// units; extra_hi widens the top end (heavy local-power tails sit above the
// cross-power scale hints)
inline std::vector<double> log_grid(const std::vector<const chan::CrossPowerStat*>& stats,
                                    int npoints, double lo_pad, double hi_pad,
                                    double extra_hi = 0.0) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto* s : stats) {
        lo = std::min(lo, std::log(s->scale_min()) - lo_pad);
        hi = std::max(hi, std::log(s->scale_max()) + hi_pad);
    }
    if (extra_hi > 0.0)
        hi = std::max(hi, std::log(extra_hi) + hi_pad);
    std::vector<double> x(npoints);
    for (int i = 0; i < npoints; ++i)
        x[i] = std::exp(lo + (hi - lo) * i / (npoints - 1));
    return x;
}

inline std::vector<std::vector<double>> sample_cdfs(
    const std::vector<const chan::CrossPowerStat*>& stats, const std::vector<double>& x) {
    std::vector<std::vector<double>> F(stats.size(), std::vector<double>(x.size()));
    for (std::size_t l = 0; l < stats.size(); ++l)
        for (std::size_t i = 0; i < x.size(); ++i)
            F[l][i] = stats[l]->cdf(x[i]);
    return F;
}

// contiguous runs of equal cell indices; competitor slots of one cell share
// one law, so products reduce to per-run counts
struct CellRun {
    std::size_t cell;
    std::size_t first_slot;
    int size;
};

inline std::vector<CellRun> group_cells(const std::vector<std::size_t>& cells) {
    std::vector<CellRun> runs;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (runs.empty() || runs.back().cell != cells[i])
            runs.push_back({cells[i], i, 0});
        ++runs.back().size;
    }
    return runs;
}

}  // namespace sleepcell::detail
