#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cranhet {

enum class TxKind { Rrh = 0, Macro = 1, Pico = 2, Femto = 3 };

const char* tx_kind_name(TxKind k);

// Static description of the network: counts, max powers, geometry and radio
// constants. Immutable after validation; sampling is a pure function of
// (Scenario, seed).
struct Scenario {
    int n_rrh = 4;
    int n_cran_users = 8;
    int n_macro = 1;
    int n_pico = 2;
    int n_femto = 2;
    int users_per_macro = 6;
    int users_per_pico = 4;
    int users_per_femto = 2;
    int n_subcarriers = 4;

    double bandwidth_hz = 100e6;
    double noise_power_w = 8.317637711026710e-13; // -90.8 dBm
    double pathloss_exponent = 3.0;

    double p_max_rrh_w = 1.0;                     // 30 dBm
    double p_max_macro_w = 5.011872336272722;     // 37 dBm
    double p_max_pico_w = 0.5011872336272723;     // 27 dBm
    double p_max_femto_w = 0.1;                   // 20 dBm

    double grid_side_m = 3000.0;
    double radius_macro_m = 1000.0;
    double radius_pico_m = 150.0;
    double radius_femto_m = 10.0;

    double rayleigh_mean_power = 10.0;            // E[|h|^2]
    double ch_tau = 1.0;                          // Poisson rate for CH levels
    int ch_top_level = 4;

    double w_over_l() const { return bandwidth_hz / n_subcarriers; }
    double p_max_for(TxKind k) const;

    // Throws InvalidArgError when an invariant is violated.
    void validate() const;
};

// Desk-scale default, identical to a default-constructed Scenario.
Scenario desk_scenario();

// Flat `key = value` text format, `#` comments. Keys are exactly the Scenario
// field names; power fields (*_w) accept a `dbm` or `w` suffix. Unknown or
// duplicate keys are rejected.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Applies one `key = value` assignment to an existing scenario (same syntax
// as a file line). Revalidates.
void scenario_set(Scenario& s, const std::string& key, const std::string& value);

struct Transmitter {
    int id = 0;
    TxKind kind = TxKind::Rrh;
    double x = 0.0, y = 0.0;
    double p_max_w = 0.0;
};

struct User {
    int id = 0;
    int owner_tx = -1; // transmitter id, or -1 when served by the CRAN
    double x = 0.0, y = 0.0;
};

// Path loss d^{-alpha} diverges at d -> 0; all stored distances are clamped
// below by this. Typical draws are unaffected.
inline constexpr double kMinDistanceM = 1.0;

// Sampled node placement with the dense transmitter-user distance table.
// Immutable after construction.
struct Deployment {
    std::vector<Transmitter> transmitters;
    std::vector<User> users;
    std::vector<double> dist; // row-major [tx][user], meters, >= kMinDistanceM

    int n_tx() const { return static_cast<int>(transmitters.size()); }
    int n_users() const { return static_cast<int>(users.size()); }

    double distance(int tx, int user) const;

    // Transmitter ids by role. RRHs come first in id order, then macro, pico,
    // femto; users are CRAN users first, then each BS's users in tx order.
    std::vector<int> rrh_ids() const;
    std::vector<int> bs_ids() const;
    std::vector<int> cran_user_ids() const;
    std::vector<int> users_of(int tx) const;

    bool operator==(const Deployment& other) const;
};

// Uniform placement on the grid for RRHs, BSs and CRAN users; each BS's users
// uniform in the disc of its coverage radius. Deterministic per seed.
Deployment sample_deployment(const Scenario& s, std::uint64_t seed);

} // namespace cranhet
