#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "core/scenario.hpp"

namespace cranhet {

// One fading realization: complex gain per (transmitter, user, subcarrier).
// Complex values are retained (beamforming weights need the phase); |h|^2 is
// cached since every rate formula uses it. Immutable after sampling.
class ChannelRealization {
public:
    ChannelRealization() = default;
    ChannelRealization(int n_tx, int n_users, int n_subcarriers);

    int n_tx() const { return n_tx_; }
    int n_users() const { return n_users_; }
    int n_subcarriers() const { return n_sub_; }

    std::complex<double> gain(int tx, int user, int k) const {
        return h_[index(tx, user, k)];
    }
    double gain_abs2(int tx, int user, int k) const { return abs2_[index(tx, user, k)]; }
    double gain_abs(int tx, int user, int k) const { return std::abs(h_[index(tx, user, k)]); }

    void set_gain(int tx, int user, int k, std::complex<double> v);

    bool operator==(const ChannelRealization& other) const {
        return n_tx_ == other.n_tx_ && n_users_ == other.n_users_ && n_sub_ == other.n_sub_ &&
               h_ == other.h_;
    }

private:
    size_t index(int tx, int user, int k) const;

    int n_tx_ = 0, n_users_ = 0, n_sub_ = 0;
    std::vector<std::complex<double>> h_;
    std::vector<double> abs2_;
};

// i.i.d. circularly-symmetric complex Gaussian gains with
// E[|h|^2] = rayleigh_mean_power, deterministic per seed. Draw order is
// (tx, user, subcarrier) row-major, so realizations are reproducible
// bit-for-bit across platforms.
ChannelRealization sample_channels(const Deployment& d, const Scenario& s, std::uint64_t seed);

// Received power |h_{ijk}|^2 * p_ik * d_ij^{-alpha}.
double rx_power(const ChannelRealization& c, const Deployment& d, const Scenario& s, int tx,
                int user, int k, double p_ik);

// Columnar text fixture format: one `tx_id user_id k re im` row per entry.
// Round-trips exactly (shortest round-trip float encoding).
void dump_channels(const ChannelRealization& c, const std::string& path);
ChannelRealization load_channels(const std::string& path);

} // namespace cranhet
