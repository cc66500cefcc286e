#pragma once

#include <complex>
#include <vector>

#include "core/channel.hpp"
#include "core/level_table.hpp"
#include "core/scenario.hpp"
#include "core/solvers.hpp"

namespace cranhet {

// Per-transmitter, per-subcarrier transmit powers for all players. Each
// transmitter's row sums to its max power (equality budget).
struct PowerProfile {
    int n_tx = 0;
    int n_sub = 0;
    std::vector<double> p; // [tx][k]

    PowerProfile() = default;
    PowerProfile(int n_tx_, int n_sub_)
        : n_tx(n_tx_), n_sub(n_sub_), p(static_cast<size_t>(n_tx_) * n_sub_, 0.0) {}

    double at(int tx, int k) const { return p[static_cast<size_t>(tx) * n_sub + k]; }
    double& at(int tx, int k) { return p[static_cast<size_t>(tx) * n_sub + k]; }

    std::vector<double> row(int tx) const {
        auto b = p.begin() + static_cast<size_t>(tx) * n_sub;
        return std::vector<double>(b, b + n_sub);
    }
    void set_row(int tx, const std::vector<double>& row);

    // p_ik = P_{i,max}/L for every transmitter.
    static PowerProfile equal_power(const Deployment& d, int n_sub);

    // Throws unless every row is nonnegative and sums to its budget within
    // rel_tol relative.
    void validate_budget(const Deployment& d, double rel_tol = 1e-9) const;

    bool operator==(const PowerProfile& other) const = default;
};

// A game player: the CU (owning all RRH rows) or a single HetNet BS.
struct PlayerId {
    bool is_cu = false;
    int tx = -1; // BS transmitter id when !is_cu

    bool operator==(const PlayerId& other) const = default;
};

// Fairness average R_bar per (user, subcarrier). The game is single-frame, so
// the default is all-ones, which reduces assignment to channel-strength argmax.
std::vector<double> unit_rbar(int n_users, int n_sub);

// Subcarrier-to-user assignment for the CRAN group and each BS group, fixed
// per realization before powers are chosen.
struct Assignment {
    int n_sub = 0;
    std::vector<int> cran_user;  // [k]; empty when the deployment has no RRHs
    std::vector<int> bs_user;    // [tx][k]; -1 on RRH rows
    std::vector<double> rbar;    // [user][k]

    int bs_user_at(int tx, int k) const { return bs_user[static_cast<size_t>(tx) * n_sub + k]; }
};

// Fairness-weighted channel-strength argmax over CRAN users, per subcarrier:
// argmax_j sum_i |h_ijk| sqrt(d_ij^-alpha) / rbar_jk, ties to the lowest id.
std::vector<int> assign_cran(const ChannelRealization& c, const Deployment& d,
                             const Scenario& s, const std::vector<double>& rbar);

// Same with the single-BS metric |h_ijk| / rbar_jk over the BS's own users.
std::vector<int> assign_bs(const ChannelRealization& c, const Deployment& d, const Scenario& s,
                           int tx, const std::vector<double>& rbar);

Assignment make_assignment(const ChannelRealization& c, const Deployment& d, const Scenario& s,
                           const std::vector<double>& rbar);
Assignment make_assignment(const ChannelRealization& c, const Deployment& d, const Scenario& s);

// MISO coherent-combining rate of the CRAN user assigned to subcarrier k:
// (W/L) log2(1 + (sum_i |h_ik| sqrt(p_ik d_ik^-alpha))^2 / (sigma^2 + HetNet interference)).
double cran_rate_k(const Scenario& s, const ChannelRealization& c, const Deployment& d,
                   const Assignment& a, const PowerProfile& profile, int k);

// Beamforming weight per RRH for subcarrier k, diagnostics only; the rate is
// computed directly from the coherent sum. Throws when all RRH powers are 0.
std::vector<std::complex<double>> beamforming_weights(const Scenario& s,
                                                      const ChannelRealization& c,
                                                      const Deployment& d, const Assignment& a,
                                                      const PowerProfile& profile, int k);

// SINR rate of the user assigned to BS tx on subcarrier k; interference from
// every other transmitter, HetNet and RRHs alike.
double bs_rate_k(const Scenario& s, const ChannelRealization& c, const Deployment& d,
                 const Assignment& a, const PowerProfile& profile, int tx, int k);

// Player utilities: sums of the per-subcarrier rates.
double utility_cu(const Scenario& s, const ChannelRealization& c, const Deployment& d,
                  const Assignment& a, const PowerProfile& profile);
double utility_bs(const Scenario& s, const ChannelRealization& c, const Deployment& d,
                  const Assignment& a, const PowerProfile& profile, int tx);

// Expected interference under cognitive-hierarchy beliefs for a level-m player
// on subcarrier k (noise excluded). For a BS the same-level mass multiplies the
// player's own p_ik over all other transmitters' gains; lower levels use the
// stored level strategies. For the CU only HetNet players at levels < m count
// and there is no same-level term.
double ch_expected_interference(const Scenario& s, const ChannelRealization& c,
                                const Deployment& d, const Assignment& a, PlayerId player,
                                int level_m, const LevelWeights& weights,
                                const LevelStrategyTable& table, int k, double own_p_ik);

} // namespace cranhet
