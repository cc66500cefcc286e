#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/channel.hpp"
#include "core/level_table.hpp"
#include "core/rates.hpp"
#include "core/scenario.hpp"
#include "core/solvers.hpp"

namespace cranhet {

enum class Concept { Ne = 0, Che = 1, EqualPower = 2 };

const char* concept_name(Concept c);      // "ne" / "che" / "equal"
Concept concept_from_name(const std::string& name);

// Aggregation kinds for reporting: per-player-type means plus the system total.
enum class RateKind { Cran = 0, Macro = 1, Pico = 2, Femto = 3, Total = 4 };

const char* rate_kind_name(RateKind k);

struct EquilibriumOptions {
    SolverOptions inner;
    double damping = 0.5;       // Gauss-Seidel damping theta
    double tol_outer_rel = 1e-6; // sweep stop, relative to each player's P_max
    int max_sweeps = 200;
};

// Converged profiles plus realized rates. Rates are always recomputed from the
// profile under the true interference, never copied from solver internals.
struct EquilibriumResult {
    Concept scheme = Concept::EqualPower;
    PowerProfile profile;

    bool has_cu = false;
    double cu_rate = 0.0;                          // CU utility when has_cu
    std::vector<std::pair<int, double>> bs_rates;  // (tx id, utility), id order

    std::array<double, 4> type_mean{};  // mean rate per RateKind (players of that kind)
    std::array<int, 4> type_count{};
    double total_rate = 0.0;

    bool converged = false;
    int iterations = 0;
    double max_residual = 0.0;

    // Mean rate for a kind (Total = system sum). NaN when no such players.
    double kind_rate(RateKind k) const;
};

struct CheSolution {
    EquilibriumResult result;
    LevelStrategyTable table;
};

// p_ik = P_{i,max}/L for every transmitter, rates evaluated.
EquilibriumResult solve_equal_power(const Scenario& s, const Deployment& d,
                                    const ChannelRealization& c);

// Damped Gauss-Seidel best-response dynamics, CU first then BSs by id, from
// equal power. Non-convergence is reported via the flags, not an error.
EquilibriumResult solve_ne(const Scenario& s, const Deployment& d, const ChannelRealization& c,
                           const EquilibriumOptions& opts = {});

// One-shot bottom-up level recursion: level 0 is equal power for every player;
// each level-h strategy best-responds to the stored strategies below h. The
// played profile takes femto=1, pico=2, macro=3, CU=4.
CheSolution solve_che(const Scenario& s, const Deployment& d, const ChannelRealization& c,
                      const EquilibriumOptions& opts = {});

// Max relative unilateral improvement over all players, each re-optimized
// exactly against the fixed profile. ~0 certifies a Nash equilibrium.
double verify_ne(const EquilibriumResult& r, const Scenario& s, const Deployment& d,
                 const ChannelRealization& c, const EquilibriumOptions& opts = {});

// Same against each player's level-specific CH utility, holding the level
// table fixed.
double verify_che(const EquilibriumResult& r, const LevelStrategyTable& table, const Scenario& s,
                  const Deployment& d, const ChannelRealization& c,
                  const EquilibriumOptions& opts = {});

// Structured JSON dumps for debugging (players -> levels -> power arrays).
std::string result_to_json(const EquilibriumResult& r, const Deployment& d);
std::string table_to_json(const LevelStrategyTable& t, const Deployment& d);

} // namespace cranhet
