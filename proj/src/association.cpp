#include "sleepcell/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "sleepcell/mathkit.hpp"
#include "gridops.hpp"

namespace sleepcell::assoc {

using num::Accum;
using detail::ipow;

namespace {

constexpr int kGridPoints = 4000;
constexpr int kMaxExactCompetitors = 20;

// 7-point Gauss-Legendre on [0,1]; exact through polynomial degree 13, which
// covers the products of piecewise-linear CDFs over up to 13 active cells
constexpr double kGlx[7] = {0.025446043828620737, 0.12923440720030277,
                            0.29707742431130141, 0.5,
                            0.70292257568869859, 0.87076559279969723,
                            0.97455395617137926};
constexpr double kGlw[7] = {0.064742483084434846, 0.13985269574463833,
                            0.19091502525255946, 0.20897959183673469,
                            0.19091502525255946, 0.13985269574463833,
                            0.064742483084434846};

// shared log-spaced abscissas spanning every stat's tabulation range, so a
// row of Stieltjes integrals telescopes exactly (see mrsp_association_row)
std::vector<double> shared_grid(const std::vector<const chan::CrossPowerStat*>& stats) {
    return detail::log_grid(stats, kGridPoints, 16.0, 7.0);
}

using detail::sample_cdfs;

// int F_loc^{u_loc} prod_i F_i^{mult_i} dF_target over the shared grid
double product_access_integral(const chan::LocalPowerStat& loc, int u_loc,
                               const std::vector<const chan::CrossPowerStat*>& comp,
                               const std::vector<int>& mult,
                               const chan::CrossPowerStat& target) {
    std::vector<const chan::CrossPowerStat*> all = comp;
    all.push_back(&target);
    const auto x = shared_grid(all);
    const auto F = sample_cdfs(all, x);
    const auto& Ft = F.back();
    Accum acc;
    for (std::size_t m = 0; m + 1 < x.size(); ++m) {
        const double dFt = Ft[m + 1] - Ft[m];
        if (dFt <= 0.0)
            continue;
        double seg = 0.0;
        for (int g = 0; g < 7; ++g) {
            const double xg = x[m] + (x[m + 1] - x[m]) * kGlx[g];
            double prod = ipow(loc.cdf(xg), u_loc);
            for (std::size_t l = 0; l < comp.size(); ++l) {
                const double v = F[l][m] + (F[l][m + 1] - F[l][m]) * kGlx[g];
                prod *= ipow(v, mult[l]);
            }
            seg += kGlw[g] * prod;
        }
        acc.add(dFt * seg);
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

}  // namespace

// ==== StatBank ====

StatBank::StatBank(Scenario scn)
    : scn_(std::move(scn)),
      local_(scn_.P, scn_.layout.R, scn_.beta, scn_.zeta) {
    ensure_pairs();
}

void StatBank::ensure_pairs() {
    for (std::size_t j : scn_.pattern.sleeping) {
        for (std::size_t k : scn_.pattern.active) {
            const double D = geom::inter_bs_distance(scn_.layout, j, k);
            auto& slot = by_dist_[key(D)];
            if (!slot)
                slot = chan::make_cross_stat(scn_.flavor, scn_.P, D, scn_.layout.R,
                                             scn_.beta, scn_.chi, scn_.series,
                                             scn_.disc.radial_zones,
                                             scn_.disc.angular_intervals);
        }
    }
}

StatBank StatBank::reconfigure(Scenario next) const {
    const auto& a = scn_;
    const bool compatible =
        next.layout.R == a.layout.R && next.layout.size() == a.layout.size() &&
        next.beta == a.beta && next.P == a.P && next.flavor == a.flavor &&
        next.zeta.kappa == a.zeta.kappa && next.zeta.theta == a.zeta.theta &&
        next.chi.kappa == a.chi.kappa && next.chi.theta == a.chi.theta &&
        next.series.max_terms == a.series.max_terms &&
        next.series.tail_tol == a.series.tail_tol &&
        next.series.grid_points == a.series.grid_points &&
        next.disc.radial_zones == a.disc.radial_zones &&
        next.disc.angular_intervals == a.disc.angular_intervals;
    if (!compatible)
        return StatBank(std::move(next));
    StatBank out(*this);
    out.scn_ = std::move(next);
    out.ensure_pairs();
    return out;
}

long long StatBank::key(double D) const {
    return std::llround(D / scn_.layout.R * 1e7);
}

const chan::CrossPowerStat& StatBank::cross(std::size_t j, std::size_t k) const {
    const double D = geom::inter_bs_distance(scn_.layout, j, k);
    auto it = by_dist_.find(key(D));
    if (it == by_dist_.end())
        throw std::out_of_range("cross stat not prepared for this cell pair");
    return *it->second;
}

double StatBank::dist(std::size_t j, std::size_t k) const {
    return geom::inter_bs_distance(scn_.layout, j, k);
}

// ==== best-case access ====

double best_case_access_greedy(const StatBank& bank, std::size_t j, std::size_t k) {
    const int U = bank.scenario().loads.at(k);
    if (U == 0)
        return 1.0;
    return product_access_integral(bank.local(), U, {}, {}, bank.cross(j, k));
}

double best_case_access_rr(int U_k) {
    if (U_k < 0)
        throw std::invalid_argument("negative load");
    return 1.0 / (U_k + 1.0);
}

std::size_t select_best(const std::vector<double>& score, const std::vector<double>& dist) {
    if (score.empty() || score.size() != dist.size())
        throw std::invalid_argument("select_best needs matching nonempty arrays");
    std::size_t best = 0;
    for (std::size_t i = 1; i < score.size(); ++i) {
        const double tol = 1e-12 * std::max(std::abs(score[i]), std::abs(score[best]));
        if (score[i] > score[best] + tol) {
            best = i;
        } else if (score[i] >= score[best] - tol) {
            // score tie: prefer the closer BS; equal distance keeps the
            // earlier entry
            if (dist[i] < dist[best] - 1e-9 * std::max(dist[i], dist[best]))
                best = i;
        }
    }
    return best;
}

std::size_t hybrid_select(const std::vector<double>& p_tilde_row,
                          const std::vector<double>& x_draws,
                          const std::vector<double>& dist_row) {
    if (p_tilde_row.size() != x_draws.size())
        throw std::invalid_argument("hybrid_select needs matching arrays");
    std::vector<double> score(p_tilde_row.size());
    for (std::size_t i = 0; i < score.size(); ++i)
        score[i] = p_tilde_row[i] * x_draws[i];
    return select_best(score, dist_row);
}

// ==== strongest-candidate association ====

std::vector<double> mrsp_association_row(const StatBank& bank, std::size_t j) {
    const auto& active = bank.scenario().pattern.active;
    std::vector<const chan::CrossPowerStat*> stats;
    stats.reserve(active.size());
    for (std::size_t k : active)
        stats.push_back(&bank.cross(j, k));
    const std::size_t n = stats.size();
    if (n == 1)
        return {1.0};

    const auto x = shared_grid(stats);
    const auto F = sample_cdfs(stats, x);
    std::vector<Accum> out(n);
    std::vector<double> v(n), pre(n + 1), suf(n + 1);
    for (std::size_t m = 0; m + 1 < x.size(); ++m) {
        std::vector<double> node_excl(n, 0.0);
        for (int g = 0; g < 7; ++g) {
            for (std::size_t l = 0; l < n; ++l)
                v[l] = F[l][m] + (F[l][m + 1] - F[l][m]) * kGlx[g];
            pre[0] = 1.0;
            for (std::size_t l = 0; l < n; ++l)
                pre[l + 1] = pre[l] * v[l];
            suf[n] = 1.0;
            for (std::size_t l = n; l-- > 0;)
                suf[l] = suf[l + 1] * v[l];
            for (std::size_t l = 0; l < n; ++l)
                node_excl[l] += kGlw[g] * pre[l] * suf[l + 1];
        }
        for (std::size_t l = 0; l < n; ++l)
            out[l].add((F[l][m + 1] - F[l][m]) * node_excl[l]);
    }
    std::vector<double> row(n);
    for (std::size_t l = 0; l < n; ++l)
        row[l] = std::clamp(out[l].value(), 0.0, 1.0);
    return row;
}

double mrsp_association_prob(const StatBank& bank, std::size_t j, std::size_t k) {
    const auto& active = bank.scenario().pattern.active;
    const auto row = mrsp_association_row(bank, j);
    for (std::size_t c = 0; c < active.size(); ++c)
        if (active[c] == k)
            return row[c];
    throw std::out_of_range("cell is not active");
}

// ==== competitor enumeration ====

UserStates enumerate_user_states(const StatBank& bank, std::size_t j, std::size_t kstar) {
    const auto& scn = bank.scenario();
    std::size_t total = 0;
    for (std::size_t l : scn.pattern.sleeping)
        total += std::max(scn.loads.at(l) - (l == j ? 1 : 0), 0);
    if (scn.enumeration.exact && total > kMaxExactCompetitors)
        throw std::runtime_error(
            "exact enumeration rejected: more than 20 competitor users; "
            "switch to the sampled policy");

    UserStates st;
    for (std::size_t l : scn.pattern.sleeping) {
        const int mult = scn.loads.at(l) - (l == j ? 1 : 0);
        if (mult <= 0)
            continue;
        const double ph = mrsp_association_prob(bank, l, kstar);
        for (int i = 0; i < mult; ++i) {
            st.cells.push_back(l);
            st.p_hat.push_back(ph);
        }
    }
    const std::size_t n = st.cells.size();
    if (scn.enumeration.exact) {
        st.combos.resize(std::size_t(1) << n);
        st.combos[0] = {{}, 1.0};
        std::size_t filled = 1;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < filled; ++c) {
                auto on = st.combos[c];
                on.b.push_back(1);
                on.prob *= st.p_hat[i];
                st.combos[c].b.push_back(0);
                st.combos[c].prob *= 1.0 - st.p_hat[i];
                st.combos[filled + c] = std::move(on);
            }
            filled *= 2;
        }
    } else {
        std::mt19937_64 rng(num::mix64(scn.enumeration.seed,
                                       num::mix64(j + 1, kstar + 1)));
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const long K = std::max(scn.enumeration.samples, 1L);
        st.combos.resize(K);
        for (long it = 0; it < K; ++it) {
            auto& cb = st.combos[it];
            cb.b.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                cb.b[i] = u01(rng) < st.p_hat[i] ? 1 : 0;
            cb.prob = 1.0 / K;
        }
    }
    return st;
}

// ==== exact access ====

double exact_access_greedy_mmap(const StatBank& bank, std::size_t j, std::size_t kstar,
                                const std::vector<std::size_t>& assoc_cells) {
    const auto& scn = bank.scenario();
    std::vector<const chan::CrossPowerStat*> comp;
    std::vector<int> mult;
    for (std::size_t f : assoc_cells) {
        const int m = scn.loads.at(f) - (f == j ? 1 : 0);
        if (m > 0) {
            comp.push_back(&bank.cross(f, kstar));
            mult.push_back(m);
        }
    }
    return product_access_integral(bank.local(), scn.loads.at(kstar), comp, mult,
                                   bank.cross(j, kstar));
}

double exact_access_rr_mmap(int U_kstar, int sum_assoc_loads) {
    if (U_kstar < 0 || sum_assoc_loads < 1)
        throw std::invalid_argument("invalid loads for round-robin access");
    return 1.0 / (U_kstar + sum_assoc_loads);
}

double access_against(const StatBank& bank, std::size_t j, std::size_t kstar,
                      const std::vector<std::size_t>& comp_cells,
                      const std::vector<int>& mult) {
    if (comp_cells.size() != mult.size())
        throw std::invalid_argument("competitor cells and multiplicities differ in length");
    std::vector<const chan::CrossPowerStat*> comp;
    comp.reserve(comp_cells.size());
    for (std::size_t c : comp_cells)
        comp.push_back(&bank.cross(c, kstar));
    return product_access_integral(bank.local(), bank.scenario().loads.at(kstar), comp,
                                   mult, bank.cross(j, kstar));
}

double exact_access_greedy_mrsp(const StatBank& bank, std::size_t j, std::size_t kstar,
                                const UserStates& states) {
    const auto& scn = bank.scenario();
    const auto groups = detail::group_cells(states.cells);
    std::vector<const chan::CrossPowerStat*> comp;
    for (const auto& gr : groups)
        comp.push_back(&bank.cross(gr.cell, kstar));

    std::map<std::vector<int>, double> memo;
    std::vector<int> counts(groups.size());
    Accum acc;
    for (const auto& cb : states.combos) {
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            int c = 0;
            for (int s = 0; s < groups[gi].size; ++s)
                c += cb.b[groups[gi].first_slot + s];
            counts[gi] = c;
        }
        auto it = memo.find(counts);
        if (it == memo.end())
            it = memo.emplace(counts,
                              product_access_integral(bank.local(), scn.loads.at(kstar),
                                                      comp, counts,
                                                      bank.cross(j, kstar)))
                     .first;
        acc.add(cb.prob * it->second);
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

double exact_access_rr_mrsp(int U_kstar, const UserStates& states) {
    if (U_kstar < 0)
        throw std::invalid_argument("negative load");
    Accum acc;
    for (const auto& cb : states.combos) {
        long present = 0;
        for (unsigned char bit : cb.b)
            present += bit;
        acc.add(cb.prob / (U_kstar + present + 1.0));
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

// ==== scenario-level report ====

std::size_t AccessReport::row_of(std::size_t cell) const {
    for (std::size_t i = 0; i < sleeping.size(); ++i)
        if (sleeping[i] == cell)
            return i;
    throw std::out_of_range("cell is not sleeping");
}

std::size_t AccessReport::col_of(std::size_t cell) const {
    for (std::size_t i = 0; i < active.size(); ++i)
        if (active[i] == cell)
            return i;
    throw std::out_of_range("cell is not active");
}

AccessReport build_access_report(const StatBank& bank) {
    const auto& scn = bank.scenario();
    AccessReport rep;
    rep.sleeping = scn.pattern.sleeping;
    rep.active = scn.pattern.active;
    std::sort(rep.sleeping.begin(), rep.sleeping.end());
    std::sort(rep.active.begin(), rep.active.end());
    const std::size_t ns = rep.sleeping.size();
    const std::size_t na = rep.active.size();
    if (na == 0)
        throw std::invalid_argument("no active BS to associate with");

    rep.p_tilde.assign(ns, std::vector<double>(na, 0.0));
    rep.p_hat.assign(ns, std::vector<double>(na, 0.0));
    rep.p_exact.assign(ns, std::vector<double>(na, 0.0));
    rep.kstar.assign(ns, AccessReport::npos);
    rep.assoc_cells.assign(na, {});

    for (std::size_t r = 0; r < ns; ++r) {
        const std::size_t j = rep.sleeping[r];
        for (std::size_t c = 0; c < na; ++c) {
            const std::size_t k = rep.active[c];
            rep.p_tilde[r][c] = scn.scheduling == Scheduling::greedy
                                    ? best_case_access_greedy(bank, j, k)
                                    : best_case_access_rr(scn.loads.at(k));
        }
    }

    if (scn.association == AssociationScheme::mmap) {
        for (std::size_t r = 0; r < ns; ++r) {
            const std::size_t j = rep.sleeping[r];
            std::vector<double> dist(na);
            for (std::size_t c = 0; c < na; ++c)
                dist[c] = bank.dist(j, rep.active[c]);
            const std::size_t c = select_best(rep.p_tilde[r], dist);
            rep.kstar[r] = rep.active[c];
            rep.p_hat[r][c] = 1.0;
            rep.assoc_cells[c].push_back(j);
        }
        for (std::size_t r = 0; r < ns; ++r) {
            const std::size_t j = rep.sleeping[r];
            const std::size_t c = rep.col_of(rep.kstar[r]);
            if (scn.scheduling == Scheduling::greedy) {
                rep.p_exact[r][c] =
                    exact_access_greedy_mmap(bank, j, rep.kstar[r], rep.assoc_cells[c]);
            } else {
                int sum = 0;
                for (std::size_t f : rep.assoc_cells[c])
                    sum += scn.loads.at(f);
                rep.p_exact[r][c] = exact_access_rr_mmap(scn.loads.at(rep.kstar[r]), sum);
            }
        }
    } else if (scn.association == AssociationScheme::mrsp) {
        for (std::size_t r = 0; r < ns; ++r)
            rep.p_hat[r] = mrsp_association_row(bank, rep.sleeping[r]);
        for (std::size_t r = 0; r < ns; ++r) {
            const std::size_t j = rep.sleeping[r];
            for (std::size_t c = 0; c < na; ++c) {
                const std::size_t k = rep.active[c];
                const auto states = enumerate_user_states(bank, j, k);
                rep.p_exact[r][c] =
                    scn.scheduling == Scheduling::greedy
                        ? exact_access_greedy_mrsp(bank, j, k, states)
                        : exact_access_rr_mrsp(scn.loads.at(k), states);
            }
        }
    }
    // hybrid association is realization-based; only the p_tilde table is
    // meaningful ahead of simulation
    return rep;
}

}  // namespace sleepcell::assoc
