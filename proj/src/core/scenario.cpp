#include "core/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/units.hpp"

namespace cranhet {

const char* tx_kind_name(TxKind k) {
    switch (k) {
        case TxKind::Rrh: return "RRH";
        case TxKind::Macro: return "Macro";
        case TxKind::Pico: return "Pico";
        case TxKind::Femto: return "Femto";
    }
    return "?";
}

double Scenario::p_max_for(TxKind k) const {
    switch (k) {
        case TxKind::Rrh: return p_max_rrh_w;
        case TxKind::Macro: return p_max_macro_w;
        case TxKind::Pico: return p_max_pico_w;
        case TxKind::Femto: return p_max_femto_w;
    }
    return 0.0;
}

void Scenario::validate() const {
    auto fail = [](const std::string& what) { throw InvalidArgError("scenario: " + what); };
    if (n_rrh < 1) fail("n_rrh must be >= 1");
    if (n_cran_users < 1) fail("n_cran_users must be >= 1");
    if (n_macro < 0 || n_pico < 0 || n_femto < 0) fail("BS counts must be >= 0");
    if (users_per_macro < 1 || users_per_pico < 1 || users_per_femto < 1)
        fail("users_per_* must be >= 1");
    if (n_subcarriers < 1) fail("n_subcarriers must be >= 1");
    if (!(bandwidth_hz > 0)) fail("bandwidth_hz must be > 0");
    if (!(noise_power_w > 0)) fail("noise_power_w must be > 0");
    if (!(pathloss_exponent > 0)) fail("pathloss_exponent must be > 0");
    if (!(p_max_rrh_w > 0 && p_max_macro_w > 0 && p_max_pico_w > 0 && p_max_femto_w > 0))
        fail("max powers must be > 0");
    if (!(grid_side_m > 0)) fail("grid_side_m must be > 0");
    if (!(radius_macro_m > 0 && radius_pico_m > 0 && radius_femto_m > 0))
        fail("coverage radii must be > 0");
    if (!(rayleigh_mean_power > 0)) fail("rayleigh_mean_power must be > 0");
    if (!(ch_tau > 0)) fail("ch_tau must be > 0");
    if (ch_top_level != 4) fail("ch_top_level must be 4");
}

Scenario desk_scenario() { return Scenario{}; }

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

double parse_real(const std::string& key, const std::string& text) {
    try {
        size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw ParseError("");
        return v;
    } catch (...) {
        throw ParseError("scenario: bad numeric value '" + text + "' for key '" + key + "'");
    }
}

int parse_count(const std::string& key, const std::string& text) {
    try {
        size_t pos = 0;
        long v = std::stol(text, &pos);
        if (pos != text.size()) throw ParseError("");
        return static_cast<int>(v);
    } catch (...) {
        throw ParseError("scenario: bad integer value '" + text + "' for key '" + key + "'");
    }
}

// Power values may carry a `dbm` or `w` suffix; plain numbers are watts.
double parse_power(const std::string& key, const std::string& text) {
    std::istringstream iss(text);
    std::string num, unit, extra;
    iss >> num >> unit >> extra;
    if (!extra.empty()) throw ParseError("scenario: trailing junk in value for key '" + key + "'");
    double v = parse_real(key, num);
    std::string u = lower(unit);
    if (u.empty() || u == "w") return v;
    if (u == "dbm") return dbm_to_watts(v);
    throw ParseError("scenario: unknown power unit '" + unit + "' for key '" + key + "'");
}

} // namespace

void scenario_set(Scenario& s, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    if (key == "n_rrh") s.n_rrh = parse_count(key, value);
    else if (key == "n_cran_users") s.n_cran_users = parse_count(key, value);
    else if (key == "n_macro") s.n_macro = parse_count(key, value);
    else if (key == "n_pico") s.n_pico = parse_count(key, value);
    else if (key == "n_femto") s.n_femto = parse_count(key, value);
    else if (key == "users_per_macro") s.users_per_macro = parse_count(key, value);
    else if (key == "users_per_pico") s.users_per_pico = parse_count(key, value);
    else if (key == "users_per_femto") s.users_per_femto = parse_count(key, value);
    else if (key == "n_subcarriers") s.n_subcarriers = parse_count(key, value);
    else if (key == "bandwidth_hz") s.bandwidth_hz = parse_real(key, value);
    else if (key == "noise_power_w") s.noise_power_w = parse_power(key, value);
    else if (key == "pathloss_exponent") s.pathloss_exponent = parse_real(key, value);
    else if (key == "p_max_rrh_w") s.p_max_rrh_w = parse_power(key, value);
    else if (key == "p_max_macro_w") s.p_max_macro_w = parse_power(key, value);
    else if (key == "p_max_pico_w") s.p_max_pico_w = parse_power(key, value);
    else if (key == "p_max_femto_w") s.p_max_femto_w = parse_power(key, value);
    else if (key == "grid_side_m") s.grid_side_m = parse_real(key, value);
    else if (key == "radius_macro_m") s.radius_macro_m = parse_real(key, value);
    else if (key == "radius_pico_m") s.radius_pico_m = parse_real(key, value);
    else if (key == "radius_femto_m") s.radius_femto_m = parse_real(key, value);
    else if (key == "rayleigh_mean_power") s.rayleigh_mean_power = parse_real(key, value);
    else if (key == "ch_tau") s.ch_tau = parse_real(key, value);
    else if (key == "ch_top_level") s.ch_top_level = parse_count(key, value);
    else throw ParseError("scenario: unknown key '" + key + "'");
    s.validate();
}

Scenario parse_scenario(const std::string& text) {
    Scenario s = desk_scenario();
    std::set<std::string> seen;
    std::istringstream iss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(iss, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("scenario: line " + std::to_string(lineno) + " has no '='");
        std::string key = trim(line.substr(0, eq));
        if (!seen.insert(key).second)
            throw ParseError("scenario: duplicate key '" + key + "' at line " +
                             std::to_string(lineno));
        scenario_set(s, key, line.substr(eq + 1));
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

double Deployment::distance(int tx, int user) const {
    if (tx < 0 || tx >= n_tx() || user < 0 || user >= n_users())
        throw InvalidArgError("deployment: distance lookup out of range");
    return dist[static_cast<size_t>(tx) * users.size() + user];
}

std::vector<int> Deployment::rrh_ids() const {
    std::vector<int> out;
    for (const auto& t : transmitters)
        if (t.kind == TxKind::Rrh) out.push_back(t.id);
    return out;
}

std::vector<int> Deployment::bs_ids() const {
    std::vector<int> out;
    for (const auto& t : transmitters)
        if (t.kind != TxKind::Rrh) out.push_back(t.id);
    return out;
}

std::vector<int> Deployment::cran_user_ids() const {
    std::vector<int> out;
    for (const auto& u : users)
        if (u.owner_tx < 0) out.push_back(u.id);
    return out;
}

std::vector<int> Deployment::users_of(int tx) const {
    std::vector<int> out;
    for (const auto& u : users)
        if (u.owner_tx == tx) out.push_back(u.id);
    return out;
}

bool Deployment::operator==(const Deployment& other) const {
    auto tx_eq = [](const Transmitter& a, const Transmitter& b) {
        return a.id == b.id && a.kind == b.kind && a.x == b.x && a.y == b.y &&
               a.p_max_w == b.p_max_w;
    };
    auto user_eq = [](const User& a, const User& b) {
        return a.id == b.id && a.owner_tx == b.owner_tx && a.x == b.x && a.y == b.y;
    };
    return std::equal(transmitters.begin(), transmitters.end(), other.transmitters.begin(),
                      other.transmitters.end(), tx_eq) &&
           std::equal(users.begin(), users.end(), other.users.begin(), other.users.end(),
                      user_eq) &&
           dist == other.dist;
}

Deployment sample_deployment(const Scenario& s, std::uint64_t seed) {
    s.validate();
    Deployment d;
    Rng rng(seed);

    auto add_tx = [&](TxKind kind, int count, double p_max) {
        for (int i = 0; i < count; ++i) {
            Transmitter t;
            t.id = d.n_tx();
            t.kind = kind;
            t.p_max_w = p_max;
            rng.point_in_square(s.grid_side_m, t.x, t.y);
            d.transmitters.push_back(t);
        }
    };
    add_tx(TxKind::Rrh, s.n_rrh, s.p_max_rrh_w);
    add_tx(TxKind::Macro, s.n_macro, s.p_max_macro_w);
    add_tx(TxKind::Pico, s.n_pico, s.p_max_pico_w);
    add_tx(TxKind::Femto, s.n_femto, s.p_max_femto_w);

    for (int i = 0; i < s.n_cran_users; ++i) {
        User u;
        u.id = d.n_users();
        u.owner_tx = -1;
        rng.point_in_square(s.grid_side_m, u.x, u.y);
        d.users.push_back(u);
    }
    for (const auto& t : d.transmitters) {
        if (t.kind == TxKind::Rrh) continue;
        int count = 0;
        double radius = 0.0;
        switch (t.kind) {
            case TxKind::Macro: count = s.users_per_macro; radius = s.radius_macro_m; break;
            case TxKind::Pico: count = s.users_per_pico; radius = s.radius_pico_m; break;
            case TxKind::Femto: count = s.users_per_femto; radius = s.radius_femto_m; break;
            default: break;
        }
        for (int i = 0; i < count; ++i) {
            User u;
            u.id = d.n_users();
            u.owner_tx = t.id;
            rng.point_in_disc(t.x, t.y, radius, u.x, u.y);
            d.users.push_back(u);
        }
    }

    d.dist.resize(static_cast<size_t>(d.n_tx()) * d.n_users());
    for (const auto& t : d.transmitters) {
        for (const auto& u : d.users) {
            const double dx = t.x - u.x, dy = t.y - u.y;
            const double euclid = std::hypot(dx, dy);
            d.dist[static_cast<size_t>(t.id) * d.n_users() + u.id] =
                std::max(euclid, kMinDistanceM);
        }
    }
    return d;
}

} // namespace cranhet
