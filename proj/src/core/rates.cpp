#include "core/rates.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace cranhet {

void PowerProfile::set_row(int tx, const std::vector<double>& row) {
    if (static_cast<int>(row.size()) != n_sub)
        throw InvalidArgError("power profile: row size mismatch");
    std::copy(row.begin(), row.end(), p.begin() + static_cast<size_t>(tx) * n_sub);
}

PowerProfile PowerProfile::equal_power(const Deployment& d, int n_sub) {
    PowerProfile prof(d.n_tx(), n_sub);
    for (const auto& t : d.transmitters) {
        const double per = t.p_max_w / n_sub;
        for (int k = 0; k < n_sub; ++k) prof.at(t.id, k) = per;
    }
    return prof;
}

void PowerProfile::validate_budget(const Deployment& d, double rel_tol) const {
    if (n_tx != d.n_tx()) throw InvalidArgError("power profile: transmitter count mismatch");
    for (const auto& t : d.transmitters) {
        double sum = 0.0;
        for (int k = 0; k < n_sub; ++k) {
            const double v = at(t.id, k);
            if (v < 0) throw InvalidArgError("power profile: negative power");
            sum += v;
        }
        if (std::abs(sum - t.p_max_w) > rel_tol * t.p_max_w)
            throw InvalidArgError("power profile: budget violated for tx " +
                                  std::to_string(t.id));
    }
}

std::vector<double> unit_rbar(int n_users, int n_sub) {
    return std::vector<double>(static_cast<size_t>(n_users) * n_sub, 1.0);
}

namespace {

double rbar_at(const std::vector<double>& rbar, int n_sub, int user, int k) {
    const double v = rbar[static_cast<size_t>(user) * n_sub + k];
    if (!(v > 0)) throw InvalidArgError("assignment: fairness averages must be > 0");
    return v;
}

// argmax with lowest-id tie break; metric must be strictly better to displace.
template <typename Metric>
int argmax_user(const std::vector<int>& candidates, Metric&& metric) {
    int best = candidates.front();
    double best_v = metric(best);
    for (size_t i = 1; i < candidates.size(); ++i) {
        const double v = metric(candidates[i]);
        if (v > best_v) {
            best_v = v;
            best = candidates[i];
        }
    }
    return best;
}

} // namespace

std::vector<int> assign_cran(const ChannelRealization& c, const Deployment& d,
                             const Scenario& s, const std::vector<double>& rbar) {
    const auto rrhs = d.rrh_ids();
    const auto users = d.cran_user_ids();
    if (rrhs.empty()) return {};
    if (users.empty()) throw InvalidArgError("assign_cran: no CRAN users");
    const int L = s.n_subcarriers;
    std::vector<int> out(L);
    for (int k = 0; k < L; ++k) {
        out[k] = argmax_user(users, [&](int j) {
            double sum = 0.0;
            for (int i : rrhs)
                sum += c.gain_abs(i, j, k) *
                       std::sqrt(std::pow(d.distance(i, j), -s.pathloss_exponent));
            return sum / rbar_at(rbar, L, j, k);
        });
    }
    return out;
}

std::vector<int> assign_bs(const ChannelRealization& c, const Deployment& d, const Scenario& s,
                           int tx, const std::vector<double>& rbar) {
    const auto users = d.users_of(tx);
    if (users.empty()) throw InvalidArgError("assign_bs: BS has no users");
    const int L = s.n_subcarriers;
    std::vector<int> out(L);
    for (int k = 0; k < L; ++k) {
        out[k] = argmax_user(users, [&](int j) {
            return c.gain_abs(tx, j, k) / rbar_at(rbar, L, j, k);
        });
    }
    return out;
}

Assignment make_assignment(const ChannelRealization& c, const Deployment& d, const Scenario& s,
                           const std::vector<double>& rbar) {
    Assignment a;
    a.n_sub = s.n_subcarriers;
    a.rbar = rbar;
    a.cran_user = assign_cran(c, d, s, rbar);
    a.bs_user.assign(static_cast<size_t>(d.n_tx()) * a.n_sub, -1);
    for (int tx : d.bs_ids()) {
        const auto u = assign_bs(c, d, s, tx, rbar);
        for (int k = 0; k < a.n_sub; ++k) a.bs_user[static_cast<size_t>(tx) * a.n_sub + k] = u[k];
    }
    return a;
}

Assignment make_assignment(const ChannelRealization& c, const Deployment& d, const Scenario& s) {
    return make_assignment(c, d, s, unit_rbar(d.n_users(), s.n_subcarriers));
}

double cran_rate_k(const Scenario& s, const ChannelRealization& c, const Deployment& d,
                   const Assignment& a, const PowerProfile& profile, int k) {
    if (a.cran_user.empty()) throw InvalidArgError("cran_rate_k: no CRAN in assignment");
    const int j = a.cran_user[k];
    double amp = 0.0;
    for (int i : d.rrh_ids()) {
        const double att = std::pow(d.distance(i, j), -s.pathloss_exponent);
        amp += c.gain_abs(i, j, k) * std::sqrt(profile.at(i, k) * att);
    }
    double den = s.noise_power_w;
    for (int l : d.bs_ids())
        den += c.gain_abs2(l, j, k) * profile.at(l, k) *
               std::pow(d.distance(l, j), -s.pathloss_exponent);
    return s.w_over_l() * std::log2(1.0 + amp * amp / den);
}

std::vector<std::complex<double>> beamforming_weights(const Scenario& s,
                                                      const ChannelRealization& c,
                                                      const Deployment& d, const Assignment& a,
                                                      const PowerProfile& profile, int k) {
    if (a.cran_user.empty()) throw InvalidArgError("beamforming_weights: no CRAN in assignment");
    const int j = a.cran_user[k];
    const auto rrhs = d.rrh_ids();
    double z = 0.0;
    for (int l : rrhs)
        z += std::sqrt(profile.at(l, k) * std::pow(d.distance(l, j), -s.pathloss_exponent));
    if (z <= 0.0)
        throw InvalidArgError("beamforming_weights: undefined for all-zero RRH powers");
    std::vector<std::complex<double>> v;
    v.reserve(rrhs.size());
    for (int i : rrhs) {
        const auto h = c.gain(i, j, k);
        const double mag = std::abs(h);
        // phase term h*/|h|; a zero gain contributes a zero weight anyway
        const std::complex<double> phase = mag > 0 ? std::conj(h) / mag
                                                   : std::complex<double>(1.0, 0.0);
        const double amp =
            std::sqrt(profile.at(i, k) * std::pow(d.distance(i, j), -s.pathloss_exponent));
        v.push_back(phase * (amp / z));
    }
    return v;
}

double bs_rate_k(const Scenario& s, const ChannelRealization& c, const Deployment& d,
                 const Assignment& a, const PowerProfile& profile, int tx, int k) {
    const int j = a.bs_user_at(tx, k);
    if (j < 0) throw InvalidArgError("bs_rate_k: transmitter is not a BS");
    const double own = c.gain_abs2(tx, j, k) * profile.at(tx, k) *
                       std::pow(d.distance(tx, j), -s.pathloss_exponent);
    double den = s.noise_power_w;
    for (const auto& t : d.transmitters) {
        if (t.id == tx) continue;
        den += c.gain_abs2(t.id, j, k) * profile.at(t.id, k) *
               std::pow(d.distance(t.id, j), -s.pathloss_exponent);
    }
    return s.w_over_l() * std::log2(1.0 + own / den);
}

double utility_cu(const Scenario& s, const ChannelRealization& c, const Deployment& d,
                  const Assignment& a, const PowerProfile& profile) {
    double sum = 0.0;
    for (int k = 0; k < s.n_subcarriers; ++k) sum += cran_rate_k(s, c, d, a, profile, k);
    return sum;
}

double utility_bs(const Scenario& s, const ChannelRealization& c, const Deployment& d,
                  const Assignment& a, const PowerProfile& profile, int tx) {
    double sum = 0.0;
    for (int k = 0; k < s.n_subcarriers; ++k) sum += bs_rate_k(s, c, d, a, profile, tx, k);
    return sum;
}

double ch_expected_interference(const Scenario& s, const ChannelRealization& c,
                                const Deployment& d, const Assignment& a, PlayerId player,
                                int level_m, const LevelWeights& weights,
                                const LevelStrategyTable& table, int k, double own_p_ik) {
    if (weights.m != level_m)
        throw InvalidArgError("ch_expected_interference: weights are for a different level");
    if (table.n_levels < level_m)
        throw InvalidArgError("ch_expected_interference: level table too shallow");

    const double alpha = s.pathloss_exponent;
    if (player.is_cu) {
        if (a.cran_user.empty())
            throw InvalidArgError("ch_expected_interference: no CRAN in assignment");
        const int j = a.cran_user[k];
        double sum = 0.0;
        for (int l : d.bs_ids()) {
            const double gain = c.gain_abs2(l, j, k) * std::pow(d.distance(l, j), -alpha);
            for (int h = 0; h < level_m; ++h) sum += weights.at(h) * gain * table.at(l, h, k);
        }
        return sum;
    }

    const int j = a.bs_user_at(player.tx, k);
    if (j < 0) throw InvalidArgError("ch_expected_interference: player is not a BS");
    double same = 0.0, lower = 0.0;
    for (const auto& t : d.transmitters) {
        if (t.id == player.tx) continue;
        const double gain = c.gain_abs2(t.id, j, k) * std::pow(d.distance(t.id, j), -alpha);
        same += gain;
        for (int h = 0; h < level_m; ++h) lower += weights.at(h) * gain * table.at(t.id, h, k);
    }
    return weights.at(level_m) * own_p_ik * same + lower;
}

} // namespace cranhet
