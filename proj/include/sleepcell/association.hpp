#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <vector>

#include "sleepcell/scenario.hpp"

namespace sleepcell::assoc {

// Signal statistics for one scenario, deduplicated by center distance: every
// (sleeping j, active k) pair at the same D shares one cross-power object.
// All cross stats are built at transmit power P; association is decided
// before any zooming, and zoomed evaluation scales transform arguments
// instead of rebuilding statistics.
class StatBank {
public:
    explicit StatBank(Scenario scn);

    const Scenario& scenario() const { return scn_; }
    const chan::LocalPowerStat& local() const { return local_; }
    const chan::CrossPowerStat& cross(std::size_t j, std::size_t k) const;
    double dist(std::size_t j, std::size_t k) const;

    // swap in a scenario that differs only in statistics-neutral fields
    // (loads, pattern, schemes, zoom, policies); the tabulated statistics are
    // shared with this bank, and any newly needed distances are filled in.
    // Falls back to a full rebuild when channel-affecting fields changed.
    StatBank reconfigure(Scenario next) const;

private:
    Scenario scn_;
    chan::LocalPowerStat local_;
    std::map<long long, std::shared_ptr<const chan::CrossPowerStat>> by_dist_;

    long long key(double D) const;
    void ensure_pairs();
};

// ==== best-case access (competition against the target cell's locals only) ====

// probability that the sleeping user's candidate signal beats all U_k local
// users under greedy scheduling, spatially averaged
double best_case_access_greedy(const StatBank& bank, std::size_t j, std::size_t k);

double best_case_access_rr(int U_k);

// argmax over parallel arrays with deterministic tie handling: near-equal
// scores (1e-12 relative) fall back to the smaller distance (1e-9 relative),
// then to the earlier position
std::size_t select_best(const std::vector<double>& score, const std::vector<double>& dist);

// simulation-side rule: argmax of p_tilde * realized candidate power
std::size_t hybrid_select(const std::vector<double>& p_tilde_row,
                          const std::vector<double>& x_draws,
                          const std::vector<double>& dist_row);

// ==== strongest-candidate association probabilities ====

// probability that BS k provides the largest candidate power among all
// active BSs, for a user of sleeping cell j
double mrsp_association_prob(const StatBank& bank, std::size_t j, std::size_t k);

// full row over the active set in one pass; sums to 1 within 1e-6
std::vector<double> mrsp_association_row(const StatBank& bank, std::size_t j);

// ==== competitor enumeration (strongest-candidate association) ====

// One on/off vector over the competitor slots with its probability. Slots
// cover every sleeping-cell user except the user of interest; users of the
// same cell share one association probability.
struct UserStates {
    std::vector<std::size_t> cells;   // slot -> sleeping cell of that competitor
    std::vector<double> p_hat;        // slot -> association probability to the target BS
    struct Combo {
        std::vector<unsigned char> b;
        double prob;
    };
    std::vector<Combo> combos;        // exact: all 2^n; sampled: drawn vectors, prob 1/K
};

// exact policy enumerates all 2^n vectors and throws when n > 20; sampled
// policy draws from the product-Bernoulli law with the policy seed
UserStates enumerate_user_states(const StatBank& bank, std::size_t j, std::size_t kstar);

// ==== exact access probabilities (all competing sleeping users included) ====

// greedy target-BS access with the associated sleeping cells' users as extra
// competitors; assoc_cells lists the sleeping cells attached to kstar and
// must contain j
double exact_access_greedy_mmap(const StatBank& bank, std::size_t j, std::size_t kstar,
                                const std::vector<std::size_t>& assoc_cells);

// round-robin closed form 1/(U_kstar + sum of attached sleeping-cell loads);
// the attached-load sum includes the user of interest's cell
double exact_access_rr_mmap(int U_kstar, int sum_assoc_loads);

// access probability against one fixed competitor multiset: the user's
// candidate beats the target's locals plus mult[i] users drawing cross power
// from comp_cells[i]; the per-combination building block of the mixtures below
double access_against(const StatBank& bank, std::size_t j, std::size_t kstar,
                      const std::vector<std::size_t>& comp_cells,
                      const std::vector<int>& mult);

double exact_access_greedy_mrsp(const StatBank& bank, std::size_t j, std::size_t kstar,
                                const UserStates& states);

double exact_access_rr_mrsp(int U_kstar, const UserStates& states);

// ==== scenario-level report ====

struct AccessReport {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::vector<std::size_t> sleeping;   // row order
    std::vector<std::size_t> active;     // column order
    std::vector<std::vector<double>> p_tilde;
    std::vector<std::vector<double>> p_hat;
    std::vector<std::vector<double>> p_exact;   // conditional on association to that column
    std::vector<std::size_t> kstar;             // chosen cell per row; npos when association is probabilistic
    std::vector<std::vector<std::size_t>> assoc_cells;  // per column: sleeping cells attached

    std::size_t row_of(std::size_t cell) const;
    std::size_t col_of(std::size_t cell) const;
};

AccessReport build_access_report(const StatBank& bank);

}  // namespace sleepcell::assoc
