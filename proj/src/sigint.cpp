#include "sleepcell/sigint.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "sleepcell/mathkit.hpp"
#include "gridops.hpp"

namespace sleepcell::sig {

namespace {

// knot count sets the piecewise-linear CDF error, which the exact segment
// transform inherits quadratically; 12800 holds the dual-route mgf gap near
// 1e-7, an order under the consistency tolerance used in the tests
constexpr int kSignalGridPoints = 12800;

// tabulation axis for a served-signal law: union of the involved cross-power
// ranges, stretched upward so the slow local-power climb toward 1 is covered
std::vector<double> signal_grid(const std::vector<const chan::CrossPowerStat*>& stats,
                                const chan::LocalPowerStat& loc) {
    const double local_ref =
        loc.P() * std::pow(loc.R(), -loc.beta()) * loc.fading().theta;
    return detail::log_grid(stats, kSignalGridPoints, 18.0, 9.0, local_ref);
}

}  // namespace

// ==== SignalPowerStat ====

SignalPowerStat::SignalPowerStat(std::vector<double> grid, std::vector<double> cond_cdf,
                                 double access, double alpha)
    : grid_(std::move(grid)), F_(std::move(cond_cdf)), p_(access) {
    if (!(p_ >= 0.0 && p_ <= 1.0))
        throw std::invalid_argument("access probability outside [0,1]");
    if (!(alpha > 0.0))
        throw std::invalid_argument("zoom factor must be positive");
    if (p_ == 0.0) {
        // no access: the law is a unit atom at zero, no tabulation needed
        grid_.clear();
        F_.clear();
        mean_cond_ = 0.0;
        return;
    }
    if (grid_.size() != F_.size() || grid_.size() < 2)
        throw std::invalid_argument("signal tabulation needs two matching knot arrays");
    if (alpha != 1.0)
        for (auto& g : grid_)
            g *= alpha;
    double run = 0.0;
    for (auto& f : F_) {
        run = std::max(run, std::clamp(f, 0.0, 1.0));
        f = run;
    }
    double area = (1.0 - F_.front()) * grid_.front();
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
        area += 0.5 * ((1.0 - F_[i]) + (1.0 - F_[i + 1])) * (grid_[i + 1] - grid_[i]);
    mean_cond_ = area;
}

double SignalPowerStat::cdf(double s) const {
    if (s < 0.0)
        return 0.0;
    if (p_ == 0.0)
        return 1.0;
    if (s == 0.0)
        return 1.0 - p_;
    if (s >= grid_.back())
        return 1.0;  // residual tabulation mass sits on the last knot
    double Fc;
    if (s <= grid_.front()) {
        Fc = F_.front();
    } else {
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
        const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
        const double w = (s - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
        Fc = F_[i - 1] + (F_[i] - F_[i - 1]) * w;
    }
    return (1.0 - p_) + p_ * Fc;
}

double SignalPowerStat::mgf(double t) const {
    if (p_ == 0.0 || t == 0.0)
        return 1.0;
    return (1.0 - p_) + p_ * num::mgf_from_cdf(grid_, F_, t);
}

std::complex<double> SignalPowerStat::mgf(std::complex<double> t) const {
    if (p_ == 0.0 || t == std::complex<double>(0.0))
        return 1.0;
    return (1.0 - p_) + p_ * num::mgf_from_cdf(grid_, F_, t);
}

double SignalPowerStat::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double u = u01(rng);
    if (p_ == 0.0 || u < 1.0 - p_)
        return 0.0;
    const double v = std::min((u - (1.0 - p_)) / p_, 1.0);
    const auto it = std::lower_bound(F_.begin(), F_.end(), v);
    if (it == F_.end())
        return grid_.back();
    const std::size_t i = static_cast<std::size_t>(it - F_.begin());
    if (i == 0)
        return grid_.front();
    const double dF = F_[i] - F_[i - 1];
    if (dF <= 0.0)
        return grid_[i];
    return grid_[i - 1] + (grid_[i] - grid_[i - 1]) * (v - F_[i - 1]) / dF;
}

// ==== per-scheme constructors ====

SignalPowerStat signal_stat_greedy_mmap(const assoc::StatBank& bank,
                                        const assoc::AccessReport& rep, std::size_t j) {
    const auto& scn = bank.scenario();
    const std::size_t r = rep.row_of(j);
    const std::size_t ks = rep.kstar.at(r);
    if (ks == assoc::AccessReport::npos)
        throw std::logic_error("serving cell not resolved for this user");
    const std::size_t c = rep.col_of(ks);

    // every user of every attached sleeping cell contends; the winner's power
    // is the maximum, so the conditional CDF is the plain product of CDFs
    std::vector<const chan::CrossPowerStat*> stats;
    std::vector<int> mult;
    for (std::size_t f : rep.assoc_cells.at(c)) {
        stats.push_back(&bank.cross(f, ks));
        mult.push_back(scn.loads.at(f));
    }
    const auto grid = signal_grid(stats, bank.local());
    const auto F = detail::sample_cdfs(stats, grid);
    const int Uk = scn.loads.at(ks);
    std::vector<double> Fc(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = detail::ipow(bank.local().cdf(grid[i]), Uk);
        for (std::size_t l = 0; l < stats.size(); ++l)
            v *= detail::ipow(F[l][i], mult[l]);
        Fc[i] = v;
    }
    return SignalPowerStat(grid, Fc, rep.p_exact[r][c], scn.alpha);
}

SignalPowerStat signal_stat_rr_mmap(const assoc::StatBank& bank,
                                    const assoc::AccessReport& rep, std::size_t j) {
    const auto& scn = bank.scenario();
    const std::size_t r = rep.row_of(j);
    const std::size_t ks = rep.kstar.at(r);
    if (ks == assoc::AccessReport::npos)
        throw std::logic_error("serving cell not resolved for this user");
    const std::vector<const chan::CrossPowerStat*> stats{&bank.cross(j, ks)};
    const auto grid = signal_grid(stats, bank.local());
    std::vector<double> Fc(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        Fc[i] = stats[0]->cdf(grid[i]);
    return SignalPowerStat(grid, Fc, rep.p_exact[r][rep.col_of(ks)], scn.alpha);
}

SignalPowerStat signal_stat_greedy_mrsp(const assoc::StatBank& bank,
                                        const assoc::AccessReport& rep, std::size_t j,
                                        std::size_t kstar) {
    const auto& scn = bank.scenario();
    const auto states = assoc::enumerate_user_states(bank, j, kstar);
    const auto runs = detail::group_cells(states.cells);

    std::vector<const chan::CrossPowerStat*> stats;
    for (std::size_t k : rep.active)
        stats.push_back(&bank.cross(j, k));
    for (const auto& run : runs)
        stats.push_back(&bank.cross(run.cell, kstar));
    const auto grid = signal_grid(stats, bank.local());
    const auto F = detail::sample_cdfs(stats, grid);
    const std::size_t na = rep.active.size();

    // shared factor: the serving cell's locals plus the candidate powers
    // from every active cell (association picked the maximum of those)
    const int Uk = scn.loads.at(kstar);
    std::vector<double> base(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = detail::ipow(bank.local().cdf(grid[i]), Uk);
        for (std::size_t a = 0; a < na; ++a)
            v *= F[a][i];
        base[i] = v;
    }

    // collapse on/off vectors to per-cell presence counts; each distinct
    // count tuple carries one access integral and one CDF product
    std::map<std::vector<int>, double> tuples;
    std::vector<int> counts(runs.size());
    for (const auto& cb : states.combos) {
        for (std::size_t g = 0; g < runs.size(); ++g) {
            int cnt = 0;
            for (int s = 0; s < runs[g].size; ++s)
                cnt += cb.b[runs[g].first_slot + s];
            counts[g] = cnt;
        }
        tuples[counts] += cb.prob;
    }

    std::vector<std::size_t> comp_cells;
    for (const auto& run : runs)
        comp_cells.push_back(run.cell);

    std::vector<double> Fsum(grid.size(), 0.0);
    double psum = 0.0;
    for (const auto& [tup, pr] : tuples) {
        const double pb = assoc::access_against(bank, j, kstar, comp_cells, tup);
        const double w = pr * pb;
        psum += w;
        if (w <= 0.0)
            continue;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double v = base[i];
            for (std::size_t g = 0; g < runs.size(); ++g)
                v *= detail::ipow(F[na + g][i], tup[g]);
            Fsum[i] += w * v;
        }
    }
    if (psum <= 0.0)
        return SignalPowerStat({}, {}, 0.0, scn.alpha);
    for (auto& v : Fsum)
        v /= psum;
    return SignalPowerStat(grid, Fsum, psum, scn.alpha);
}

SignalPowerStat signal_stat_rr_mrsp(const assoc::StatBank& bank,
                                    const assoc::AccessReport& rep, std::size_t j,
                                    std::size_t kstar) {
    const auto& scn = bank.scenario();
    std::vector<const chan::CrossPowerStat*> stats;
    for (std::size_t k : rep.active)
        stats.push_back(&bank.cross(j, k));
    const auto grid = signal_grid(stats, bank.local());
    const auto F = detail::sample_cdfs(stats, grid);
    std::vector<double> Fc(grid.size(), 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t a = 0; a < stats.size(); ++a)
            Fc[i] *= F[a][i];
    const double p = rep.p_exact[rep.row_of(j)][rep.col_of(kstar)];
    return SignalPowerStat(grid, Fc, p, scn.alpha);
}

std::vector<ServedPair> served_pairs(const assoc::StatBank& bank,
                                     const assoc::AccessReport& rep, std::size_t j) {
    const auto& scn = bank.scenario();
    std::vector<ServedPair> out;
    switch (scn.association) {
    case AssociationScheme::mmap: {
        const std::size_t ks = rep.kstar.at(rep.row_of(j));
        ServedPair pair;
        pair.cell = j;
        pair.serving = ks;
        pair.weight = 1.0;
        pair.signal = scn.scheduling == Scheduling::greedy
                          ? signal_stat_greedy_mmap(bank, rep, j)
                          : signal_stat_rr_mmap(bank, rep, j);
        out.push_back(std::move(pair));
        break;
    }
    case AssociationScheme::mrsp: {
        const std::size_t r = rep.row_of(j);
        for (std::size_t c = 0; c < rep.active.size(); ++c) {
            ServedPair pair;
            pair.cell = j;
            pair.serving = rep.active[c];
            pair.weight = rep.p_hat[r][c];
            pair.signal = scn.scheduling == Scheduling::greedy
                              ? signal_stat_greedy_mrsp(bank, rep, j, pair.serving)
                              : signal_stat_rr_mrsp(bank, rep, j, pair.serving);
            out.push_back(std::move(pair));
        }
        break;
    }
    default:
        throw std::invalid_argument(
            "the hybrid rule has no closed-form signal law; run the simulator");
    }
    return out;
}

// ==== zooming ====

double zoom_probability(const assoc::StatBank& bank, const assoc::AccessReport& rep,
                        std::size_t col, ZoomConvention conv, std::size_t exclude_cell,
                        bool* clamped) {
    const auto& scn = bank.scenario();
    double raw = 0.0;
    auto add = [&](std::size_t cell, std::size_t row) {
        const int heads = scn.loads.at(cell) - (cell == exclude_cell ? 1 : 0);
        if (heads <= 0)
            return;
        const double pe = rep.p_exact[row][col];
        raw += conv == ZoomConvention::per_cell ? pe : heads * pe;
    };
    switch (scn.association) {
    case AssociationScheme::mmap:
        for (std::size_t f : rep.assoc_cells.at(col))
            add(f, rep.row_of(f));
        break;
    case AssociationScheme::mrsp:
        for (std::size_t r = 0; r < rep.sleeping.size(); ++r)
            add(rep.sleeping[r], r);
        break;
    default:
        throw std::invalid_argument(
            "zooming probabilities need exact access probabilities; "
            "the hybrid rule is simulation-only");
    }
    if (clamped)
        *clamped = raw > 1.0;
    return std::clamp(raw, 0.0, 1.0);
}

// ==== cumulative interference ====

InterferenceStat::InterferenceStat(std::vector<Term> terms, double alpha)
    : terms_(std::move(terms)), alpha_(alpha) {
    if (!(alpha_ > 0.0))
        throw std::invalid_argument("zoom factor must be positive");
    for (const auto& term : terms_)
        if (!(term.p_zoom >= 0.0 && term.p_zoom <= 1.0))
            throw std::invalid_argument("zoom probability outside [0,1]");
}

namespace {

template <typename T>
T interference_mgf_impl(const std::vector<InterferenceStat::Term>& terms, double alpha,
                        T t) {
    T out(1.0);
    for (const auto& term : terms) {
        if (alpha == 1.0 || term.p_zoom == 0.0)
            out *= term.stat->mgf(t);
        else
            out *= (1.0 - term.p_zoom) * term.stat->mgf(t) +
                   term.p_zoom * term.stat->mgf(alpha * t);
    }
    return out;
}

}  // namespace

double InterferenceStat::mgf(double t) const {
    return interference_mgf_impl(terms_, alpha_, t);
}

std::complex<double> InterferenceStat::mgf(std::complex<double> t) const {
    return interference_mgf_impl(terms_, alpha_, t);
}

double InterferenceStat::mean() const {
    double sum = 0.0;
    for (const auto& term : terms_)
        sum += ((1.0 - term.p_zoom) + term.p_zoom * alpha_) * term.stat->mean();
    return sum;
}

InterferenceStat interference_stat(const assoc::StatBank& bank,
                                   const assoc::AccessReport& rep, std::size_t j,
                                   std::size_t serving, ZoomConvention conv) {
    std::vector<InterferenceStat::Term> terms;
    for (std::size_t c = 0; c < rep.active.size(); ++c) {
        const std::size_t k = rep.active[c];
        if (k == serving)
            continue;
        terms.push_back({&bank.cross(j, k), zoom_probability(bank, rep, c, conv, j)});
    }
    return InterferenceStat(std::move(terms), bank.scenario().alpha);
}

}  // namespace sleepcell::sig
