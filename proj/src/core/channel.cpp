#include "core/channel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace cranhet {

ChannelRealization::ChannelRealization(int n_tx, int n_users, int n_subcarriers)
    : n_tx_(n_tx), n_users_(n_users), n_sub_(n_subcarriers) {
    if (n_tx < 1 || n_users < 1 || n_subcarriers < 1)
        throw InvalidArgError("channel: dimensions must be >= 1");
    const size_t n = static_cast<size_t>(n_tx) * n_users * n_subcarriers;
    h_.assign(n, {0.0, 0.0});
    abs2_.assign(n, 0.0);
}

size_t ChannelRealization::index(int tx, int user, int k) const {
    if (tx < 0 || tx >= n_tx_ || user < 0 || user >= n_users_ || k < 0 || k >= n_sub_)
        throw InvalidArgError("channel: gain lookup out of range (tx=" + std::to_string(tx) +
                              ", user=" + std::to_string(user) + ", k=" + std::to_string(k) +
                              ")");
    return (static_cast<size_t>(tx) * n_users_ + user) * n_sub_ + k;
}

void ChannelRealization::set_gain(int tx, int user, int k, std::complex<double> v) {
    const size_t i = index(tx, user, k);
    h_[i] = v;
    abs2_[i] = std::norm(v);
}

ChannelRealization sample_channels(const Deployment& d, const Scenario& s, std::uint64_t seed) {
    ChannelRealization c(d.n_tx(), d.n_users(), s.n_subcarriers);
    Rng rng(seed);
    for (int t = 0; t < d.n_tx(); ++t)
        for (int u = 0; u < d.n_users(); ++u)
            for (int k = 0; k < s.n_subcarriers; ++k)
                c.set_gain(t, u, k, rng.complex_gaussian(s.rayleigh_mean_power));
    return c;
}

double rx_power(const ChannelRealization& c, const Deployment& d, const Scenario& s, int tx,
                int user, int k, double p_ik) {
    if (p_ik < 0) throw InvalidArgError("rx_power: negative transmit power");
    return c.gain_abs2(tx, user, k) * p_ik * std::pow(d.distance(tx, user), -s.pathloss_exponent);
}

namespace {

std::string format_shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

void dump_channels(const ChannelRealization& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open channel dump for writing: " + path);
    out << c.n_tx() << ' ' << c.n_users() << ' ' << c.n_subcarriers() << '\n';
    for (int t = 0; t < c.n_tx(); ++t)
        for (int u = 0; u < c.n_users(); ++u)
            for (int k = 0; k < c.n_subcarriers(); ++k) {
                const auto g = c.gain(t, u, k);
                out << t << ' ' << u << ' ' << k << ' ' << format_shortest(g.real()) << ' '
                    << format_shortest(g.imag()) << '\n';
            }
    if (!out) throw IoError("write failed on channel dump: " + path);
}

ChannelRealization load_channels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open channel dump: " + path);
    int n_tx = 0, n_users = 0, n_sub = 0;
    if (!(in >> n_tx >> n_users >> n_sub))
        throw ParseError("channel dump: bad header in " + path);
    ChannelRealization c(n_tx, n_users, n_sub);
    int t, u, k;
    double re, im;
    while (in >> t >> u >> k >> re >> im) c.set_gain(t, u, k, {re, im});
    if (!in.eof()) throw ParseError("channel dump: malformed row in " + path);
    return c;
}

} // namespace cranhet
