#include "sleepcell/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "sleepcell/mathkit.hpp"
#include "sleepcell/metrics.hpp"

namespace sleepcell::mc {
namespace {

// Chunk size is a fixed constant so the thread count can never move chunk
// boundaries; determinism depends on it.
constexpr long kChunk = 4096;
constexpr int kGridPoints = 131;

double u01(std::mt19937_64& eng) {
    return (eng() >> 11) * 0x1.0p-53;
}

double gamma_draw(std::mt19937_64& eng, const chan::GammaFading& f) {
    std::gamma_distribution<double> d(f.kappa, f.theta);
    return d(eng);
}

// ==== per-run constants ====

struct Tables {
    const Scenario* scn = nullptr;
    std::vector<std::size_t> rows;  // sleeping cells, ascending
    std::vector<std::size_t> cols;  // active cells, ascending
    std::vector<int> load_row, load_col;
    std::vector<geom::Point> crow, ccol;
    std::vector<std::size_t> kcol;                // minimum-load serving column per row
    std::vector<std::vector<double>> p_tilde;     // hybrid scoring rows
    std::vector<std::vector<double>> dist_row;    // center distances for tie handling
    double R = 0.0, P = 0.0, beta = 0.0, alpha = 1.0, sigma2 = 0.0, Q = 0.0;
    bool rr = false;
    AssociationScheme asc = AssociationScheme::mmap;
    std::vector<double> grid;
    std::size_t ns = 0, na = 0, nloc = 0, nslp = 0;
    std::vector<std::size_t> loc_off, slp_off;    // flattened user offsets
    std::vector<std::size_t> slot_row;            // sleeping user slot -> row
};

Tables build_tables(const assoc::StatBank& bank) {
    const Scenario& scn = bank.scenario();
    Tables t;
    t.scn = &scn;
    t.rows = scn.pattern.sleeping;
    t.cols = scn.pattern.active;
    std::sort(t.rows.begin(), t.rows.end());
    std::sort(t.cols.begin(), t.cols.end());
    if (t.cols.empty())
        throw std::invalid_argument("simulation needs at least one active cell");
    t.ns = t.rows.size();
    t.na = t.cols.size();
    for (std::size_t j : t.rows) {
        t.load_row.push_back(scn.loads.at(j));
        t.crow.push_back(scn.layout.cells.at(j).center);
    }
    for (std::size_t k : t.cols) {
        t.load_col.push_back(scn.loads.at(k));
        t.ccol.push_back(scn.layout.cells.at(k).center);
    }
    t.R = scn.layout.R;
    t.P = scn.P;
    t.beta = scn.beta;
    t.alpha = scn.alpha;
    t.sigma2 = scn.sigma2;
    t.Q = scn.Q;
    t.rr = scn.scheduling == Scheduling::round_robin;
    t.asc = scn.association;

    t.dist_row.assign(t.ns, std::vector<double>(t.na, 0.0));
    for (std::size_t r = 0; r < t.ns; ++r)
        for (std::size_t c = 0; c < t.na; ++c)
            t.dist_row[r][c] = bank.dist(t.rows[r], t.cols[c]);

    // the minimum-load serving cell is load-based, decided once up front; the
    // scoring row mirrors the access report so both paths pick the same cell
    if (t.asc != AssociationScheme::mrsp) {
        t.p_tilde.assign(t.ns, std::vector<double>(t.na, 0.0));
        for (std::size_t r = 0; r < t.ns; ++r)
            for (std::size_t c = 0; c < t.na; ++c)
                t.p_tilde[r][c] = t.rr ? assoc::best_case_access_rr(t.load_col[c])
                                       : assoc::best_case_access_greedy(bank, t.rows[r], t.cols[c]);
    }
    if (t.asc == AssociationScheme::mmap) {
        t.kcol.assign(t.ns, 0);
        for (std::size_t r = 0; r < t.ns; ++r)
            t.kcol[r] = assoc::select_best(t.p_tilde[r], t.dist_row[r]);
    }

    t.loc_off.assign(t.na + 1, 0);
    for (std::size_t c = 0; c < t.na; ++c)
        t.loc_off[c + 1] = t.loc_off[c] + static_cast<std::size_t>(std::max(0, t.load_col[c]));
    t.nloc = t.loc_off.back();
    t.slp_off.assign(t.ns + 1, 0);
    for (std::size_t r = 0; r < t.ns; ++r)
        t.slp_off[r + 1] = t.slp_off[r] + static_cast<std::size_t>(std::max(0, t.load_row[r]));
    t.nslp = t.slp_off.back();
    t.slot_row.resize(t.nslp);
    for (std::size_t r = 0; r < t.ns; ++r)
        for (std::size_t i = t.slp_off[r]; i < t.slp_off[r + 1]; ++i)
            t.slot_row[i] = r;

    // fixed histogram grid for the marked-user served power, wide enough for
    // any serving distance the layout can produce
    const double ref = scn.alpha * scn.P * std::pow(scn.layout.R, -scn.beta);
    const double lo = std::log(ref * 1e-13);
    const double hi = std::log(ref * 1e3);
    t.grid.resize(kGridPoints);
    for (int i = 0; i < kGridPoints; ++i)
        t.grid[i] = std::exp(lo + (hi - lo) * i / (kGridPoints - 1));
    return t;
}

// ==== accumulators ====

struct Partial {
    std::vector<double> win, chose, win_c;   // ns, ns*na, ns*na
    std::vector<double> rate, rate2, out;    // ns
    std::vector<double> zoom_m, zoom_a;      // na
    double nz = 0.0, nz2 = 0.0;
    double net = 0.0, net2 = 0.0;
    double slp = 0.0, slp2 = 0.0;
    std::vector<double> hist;                // ns * (G+1)

    void init(std::size_t ns, std::size_t na, std::size_t G) {
        win.assign(ns, 0.0);
        chose.assign(ns * na, 0.0);
        win_c.assign(ns * na, 0.0);
        rate.assign(ns, 0.0);
        rate2.assign(ns, 0.0);
        out.assign(ns, 0.0);
        zoom_m.assign(na, 0.0);
        zoom_a.assign(na, 0.0);
        hist.assign(ns * (G + 1), 0.0);
    }

    void merge(const Partial& o) {
        auto add = [](std::vector<double>& a, const std::vector<double>& b) {
            for (std::size_t i = 0; i < a.size(); ++i)
                a[i] += b[i];
        };
        add(win, o.win);
        add(chose, o.chose);
        add(win_c, o.win_c);
        add(rate, o.rate);
        add(rate2, o.rate2);
        add(out, o.out);
        add(zoom_m, o.zoom_m);
        add(zoom_a, o.zoom_a);
        add(hist, o.hist);
        nz += o.nz;
        nz2 += o.nz2;
        net += o.net;
        net2 += o.net2;
        slp += o.slp;
        slp2 += o.slp2;
    }
};

struct Winner {
    int kind = 0;             // 0 none, 1 local, 2 sleeping
    std::size_t idx = 0;      // flattened user slot
    std::size_t row = 0;      // sleeping row when kind == 2
    double pw = 0.0;          // raw received power before zooming
};

struct Workspace {
    std::vector<double> lx, ly, lpw;          // locals
    std::vector<double> sx, sy, spw;          // sleeping users
    std::vector<std::size_t> scol;            // chosen column per sleeping user
    std::vector<double> xdraw;                // per-column candidates of one user
    std::vector<Winner> winner;
    std::vector<char> zoom;

    void size_for(const Tables& t) {
        lx.resize(t.nloc);
        ly.resize(t.nloc);
        lpw.resize(t.nloc);
        sx.resize(t.nslp);
        sy.resize(t.nslp);
        spw.resize(t.nslp);
        scol.resize(t.nslp);
        xdraw.resize(t.na);
        winner.resize(t.na);
        zoom.resize(t.na);
    }
};

// one point uniform on the cell disk; the radial draw is clamped away from
// the exact center so the path-loss power stays finite
void draw_position(std::mt19937_64& eng, const geom::Point& ctr, double R, double& x, double& y,
                   double& r) {
    const double u = std::max(u01(eng), 1e-12);
    r = R * std::sqrt(u);
    const double th = 2.0 * num::kPi * u01(eng);
    x = ctr.x + r * std::cos(th);
    y = ctr.y + r * std::sin(th);
}

void run_iteration(const Tables& t, long it, std::uint64_t seed, bool rates, bool cdf,
                   Workspace& w, Partial& p) {
    std::mt19937_64 eng(num::mix64(seed, static_cast<std::uint64_t>(it)));
    const Scenario& scn = *t.scn;

    // local users: position and own-link power
    for (std::size_t c = 0; c < t.na; ++c)
        for (std::size_t i = t.loc_off[c]; i < t.loc_off[c + 1]; ++i) {
            double r = 0.0;
            draw_position(eng, t.ccol[c], t.R, w.lx[i], w.ly[i], r);
            w.lpw[i] = t.P * gamma_draw(eng, scn.zeta) * std::pow(r, -t.beta);
        }

    // sleeping users: position, association, serving candidate power
    for (std::size_t r = 0; r < t.ns; ++r)
        for (std::size_t i = t.slp_off[r]; i < t.slp_off[r + 1]; ++i) {
            double rr = 0.0;
            draw_position(eng, t.crow[r], t.R, w.sx[i], w.sy[i], rr);
            if (t.asc == AssociationScheme::mmap) {
                const std::size_t c = t.kcol[r];
                const double d = std::hypot(w.sx[i] - t.ccol[c].x, w.sy[i] - t.ccol[c].y);
                w.scol[i] = c;
                w.spw[i] = t.P * gamma_draw(eng, scn.chi) * std::pow(d, -t.beta);
            } else {
                for (std::size_t c = 0; c < t.na; ++c) {
                    const double d = std::hypot(w.sx[i] - t.ccol[c].x, w.sy[i] - t.ccol[c].y);
                    w.xdraw[c] = t.P * gamma_draw(eng, scn.chi) * std::pow(d, -t.beta);
                }
                std::size_t c = 0;
                if (t.asc == AssociationScheme::hybrid) {
                    c = assoc::hybrid_select(t.p_tilde[r], w.xdraw, t.dist_row[r]);
                } else {
                    for (std::size_t k = 1; k < t.na; ++k)
                        if (w.xdraw[k] > w.xdraw[c])
                            c = k;
                }
                w.scol[i] = c;
                w.spw[i] = w.xdraw[c];
            }
        }

    // one served user per active BS; contenders are the cell's locals followed
    // by the attached sleeping users, so equal powers resolve to the lowest
    // user index
    for (std::size_t c = 0; c < t.na; ++c) {
        Winner& win = w.winner[c];
        win = Winner{};
        if (t.rr) {
            const std::size_t nl = t.loc_off[c + 1] - t.loc_off[c];
            std::size_t n = nl;
            for (std::size_t i = 0; i < t.nslp; ++i)
                n += w.scol[i] == c;
            if (n > 0) {
                std::size_t pick = static_cast<std::size_t>(u01(eng) * n);
                if (pick < nl) {
                    win.kind = 1;
                    win.idx = t.loc_off[c] + pick;
                    win.pw = w.lpw[win.idx];
                } else {
                    pick -= nl;
                    for (std::size_t i = 0; i < t.nslp; ++i)
                        if (w.scol[i] == c && pick-- == 0) {
                            win.kind = 2;
                            win.idx = i;
                            win.row = t.slot_row[i];
                            win.pw = w.spw[i];
                            break;
                        }
                }
            }
        } else {
            for (std::size_t i = t.loc_off[c]; i < t.loc_off[c + 1]; ++i)
                if (win.kind == 0 || w.lpw[i] > win.pw) {
                    win.kind = 1;
                    win.idx = i;
                    win.pw = w.lpw[i];
                }
            for (std::size_t i = 0; i < t.nslp; ++i)
                if (w.scol[i] == c && (win.kind == 0 || w.spw[i] > win.pw)) {
                    win.kind = 2;
                    win.idx = i;
                    win.row = t.slot_row[i];
                    win.pw = w.spw[i];
                }
        }
        w.zoom[c] = win.kind == 2;
    }

    // collect association and zooming
    double nz = 0.0;
    for (std::size_t c = 0; c < t.na; ++c)
        if (w.zoom[c]) {
            nz += 1.0;
            p.zoom_a[c] += 1.0;
            const Winner& win = w.winner[c];
            if (win.idx == t.slp_off[win.row])
                p.zoom_m[c] += 1.0;
        }
    p.nz += nz;
    p.nz2 += nz * nz;
    for (std::size_t r = 0; r < t.ns; ++r) {
        if (t.slp_off[r + 1] == t.slp_off[r])
            continue;
        const std::size_t m = t.slp_off[r];  // marked user of the row
        const std::size_t c = w.scol[m];
        p.chose[r * t.na + c] += 1.0;
        const Winner& win = w.winner[c];
        const bool won = win.kind == 2 && win.idx == m;
        if (won) {
            p.win[r] += 1.0;
            p.win_c[r * t.na + c] += 1.0;
        }
        if (cdf) {
            const double s = won ? t.alpha * win.pw : 0.0;
            const std::size_t g = std::lower_bound(t.grid.begin(), t.grid.end(), s) -
                                  t.grid.begin();
            p.hist[r * (t.grid.size() + 1) + g] += 1.0;
        }
        if (!rates && !won)
            p.out[r] += 1.0;  // unserved counts as outage even without SINR draws
    }

    if (!rates)
        return;

    // winners' SINRs with zoom-scaled powers; silent cells do not radiate
    double net = 0.0;
    double slp = 0.0;
    for (std::size_t c = 0; c < t.na; ++c) {
        const Winner& win = w.winner[c];
        if (win.kind == 0)
            continue;
        const double px = win.kind == 1 ? w.lx[win.idx] : w.sx[win.idx];
        const double py = win.kind == 1 ? w.ly[win.idx] : w.sy[win.idx];
        const double S = (w.zoom[c] ? t.alpha : 1.0) * win.pw;
        double I = 0.0;
        for (std::size_t c2 = 0; c2 < t.na; ++c2) {
            if (c2 == c || w.winner[c2].kind == 0)
                continue;
            const double d = std::hypot(px - t.ccol[c2].x, py - t.ccol[c2].y);
            const double x = t.P * gamma_draw(eng, scn.chi) * std::pow(d, -t.beta);
            I += (w.zoom[c2] ? t.alpha : 1.0) * x;
        }
        const double rate = std::log1p(S / (I + t.sigma2));
        net += rate;
        if (win.kind == 2) {
            slp += rate;
            const std::size_t r = win.row;
            if (win.idx == t.slp_off[r]) {
                p.rate[r] += rate;
                p.rate2[r] += rate * rate;
                if (t.Q * I > S)
                    p.out[r] += 1.0;
            }
        }
    }
    // marked users that lost their contest (or whose cell chose elsewhere)
    for (std::size_t r = 0; r < t.ns; ++r) {
        if (t.slp_off[r + 1] == t.slp_off[r])
            continue;
        const std::size_t m = t.slp_off[r];
        const Winner& win = w.winner[w.scol[m]];
        if (!(win.kind == 2 && win.idx == m))
            p.out[r] += 1.0;
    }
    p.net += net;
    p.net2 += net * net;
    p.slp += slp;
    p.slp2 += slp * slp;
}

Estimate freq_est(double count, double n) {
    const double v = count / n;
    return {v, std::sqrt(std::max(0.0, v * (1.0 - v)) / n)};
}

Estimate mean_est(double sum, double sumsq, double n) {
    const double v = sum / n;
    return {v, std::sqrt(std::max(0.0, sumsq / n - v * v) / n)};
}

}  // namespace

SimResult run(const assoc::StatBank& bank, const SimConfig& cfg) {
    if (cfg.iterations < 1)
        throw std::invalid_argument("simulation needs at least one iteration");
    const Tables t = build_tables(bank);
    const Scenario& scn = bank.scenario();

    const long nchunks = (cfg.iterations + kChunk - 1) / kChunk;
    std::vector<Partial> parts(nchunks);
    for (auto& p : parts)
        p.init(t.ns, t.na, t.grid.size());

    const int nthreads =
        static_cast<int>(std::min<long>(std::max(1, cfg.threads), nchunks));
    std::atomic<long> next{0};
    auto worker = [&]() {
        Workspace w;
        w.size_for(t);
        for (long c; (c = next.fetch_add(1)) < nchunks;) {
            const long lo = c * kChunk;
            const long hi = std::min(cfg.iterations, lo + kChunk);
            for (long it = lo; it < hi; ++it)
                run_iteration(t, it, cfg.seed, cfg.collect_rates, cfg.collect_cdf, w,
                              parts[c]);
        }
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    Partial total;
    total.init(t.ns, t.na, t.grid.size());
    for (const auto& p : parts)
        total.merge(p);

    const double n = static_cast<double>(cfg.iterations);
    SimResult res;
    res.sleeping = t.rows;
    res.active = t.cols;
    res.iterations = cfg.iterations;
    res.seed = cfg.seed;

    res.access.resize(t.ns);
    res.chose.assign(t.ns, std::vector<double>(t.na, 0.0));
    res.access_given.assign(t.ns, std::vector<Estimate>(t.na));
    res.user_rate.resize(t.ns);
    res.user_outage.resize(t.ns);
    for (std::size_t r = 0; r < t.ns; ++r) {
        res.access[r] = freq_est(total.win[r], n);
        res.user_rate[r] = mean_est(total.rate[r], total.rate2[r], n);
        res.user_outage[r] = freq_est(total.out[r], n);
        for (std::size_t c = 0; c < t.na; ++c) {
            const double chose = total.chose[r * t.na + c];
            res.chose[r][c] = chose / n;
            if (chose > 0.0)
                res.access_given[r][c] = freq_est(total.win_c[r * t.na + c], chose);
        }
    }
    res.zoom_marked.resize(t.na);
    res.zoom_any.resize(t.na);
    for (std::size_t c = 0; c < t.na; ++c) {
        res.zoom_marked[c] = freq_est(total.zoom_m[c], n);
        res.zoom_any[c] = freq_est(total.zoom_a[c], n);
    }
    res.n_zoom = mean_est(total.nz, total.nz2, n);
    res.sleeping_rate = mean_est(total.slp, total.slp2, n);
    res.network_rate = mean_est(total.net, total.net2, n);

    const met::PowerReport pw = met::network_power(scn, res.n_zoom.value);
    res.power = {pw.p_mean,
                 scn.power.delta_dyn * scn.P * (scn.alpha - 1.0) * res.n_zoom.std_error};
    res.energy_efficiency =
        met::energy_efficiency(met::nats_to_bits(res.network_rate.value), pw.p_mean);

    if (cfg.collect_cdf) {
        res.cdf_grid = t.grid;
        res.cdf.assign(t.ns, std::vector<double>(t.grid.size(), 0.0));
        for (std::size_t r = 0; r < t.ns; ++r) {
            double acc = 0.0;
            for (std::size_t g = 0; g < t.grid.size(); ++g) {
                acc += total.hist[r * (t.grid.size() + 1) + g];
                res.cdf[r][g] = acc / n;
            }
        }
    }
    return res;
}

}  // namespace sleepcell::mc
