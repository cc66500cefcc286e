#include "core/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "core/errors.hpp"

namespace cranhet {

const char* concept_name(Concept c) {
    switch (c) {
        case Concept::Ne: return "ne";
        case Concept::Che: return "che";
        case Concept::EqualPower: return "equal";
    }
    return "?";
}

Concept concept_from_name(const std::string& name) {
    if (name == "ne") return Concept::Ne;
    if (name == "che") return Concept::Che;
    if (name == "equal") return Concept::EqualPower;
    throw InvalidArgError("unknown concept '" + name + "' (expected ne|che|equal)");
}

const char* rate_kind_name(RateKind k) {
    switch (k) {
        case RateKind::Cran: return "CRAN";
        case RateKind::Macro: return "Macro";
        case RateKind::Pico: return "Pico";
        case RateKind::Femto: return "Femto";
        case RateKind::Total: return "Total";
    }
    return "?";
}

double EquilibriumResult::kind_rate(RateKind k) const {
    if (k == RateKind::Total) return total_rate;
    const int i = static_cast<int>(k);
    if (type_count[i] == 0) return std::numeric_limits<double>::quiet_NaN();
    return type_mean[i];
}

namespace {

constexpr double kImprovementEps = 1e-30;

// Precomputed channel-gain tables toward each player's assigned users. All
// solver drivers and realized-rate evaluations read these; agreement with the
// direct per-subcarrier formulas is covered by tests.
struct LinkTables {
    const Scenario* s = nullptr;
    int L = 0;
    std::vector<int> rrhs; // tx ids in id order
    std::vector<int> bss;

    // toward the CRAN user assigned to k (empty without RRHs)
    std::vector<double> cran_coef; // [k][rrh_idx]  |h| sqrt(d^-alpha)
    std::vector<double> cran_intf; // [k][bs_idx]   |h|^2 d^-alpha

    // toward the user assigned to BS (bs_idx) on k
    std::vector<double> bs_own;  // [bs_idx][k]
    std::vector<double> bs_intf; // [bs_idx][k][tx] over all transmitters, self = 0

    LinkTables(const Scenario& sc, const ChannelRealization& c, const Deployment& d,
               const Assignment& a)
        : s(&sc), L(sc.n_subcarriers), rrhs(d.rrh_ids()), bss(d.bs_ids()) {
        const double alpha = sc.pathloss_exponent;
        const int n_tx = d.n_tx();

        if (!rrhs.empty()) {
            cran_coef.resize(static_cast<size_t>(L) * rrhs.size());
            cran_intf.resize(static_cast<size_t>(L) * bss.size());
            for (int k = 0; k < L; ++k) {
                const int j = a.cran_user[k];
                for (size_t i = 0; i < rrhs.size(); ++i) {
                    const double att = std::pow(d.distance(rrhs[i], j), -alpha);
                    cran_coef[k * rrhs.size() + i] = c.gain_abs(rrhs[i], j, k) * std::sqrt(att);
                }
                for (size_t b = 0; b < bss.size(); ++b)
                    cran_intf[k * bss.size() + b] =
                        c.gain_abs2(bss[b], j, k) * std::pow(d.distance(bss[b], j), -alpha);
            }
        }

        bs_own.resize(bss.size() * static_cast<size_t>(L));
        bs_intf.assign(bss.size() * static_cast<size_t>(L) * n_tx, 0.0);
        for (size_t b = 0; b < bss.size(); ++b) {
            const int tx = bss[b];
            for (int k = 0; k < L; ++k) {
                const int j = a.bs_user_at(tx, k);
                bs_own[b * L + k] =
                    c.gain_abs2(tx, j, k) * std::pow(d.distance(tx, j), -alpha);
                for (int t = 0; t < n_tx; ++t) {
                    if (t == tx) continue;
                    bs_intf[(b * L + k) * n_tx + t] =
                        c.gain_abs2(t, j, k) * std::pow(d.distance(t, j), -alpha);
                }
            }
        }
    }

    double cu_utility(const PowerProfile& p) const {
        double sum = 0.0;
        for (int k = 0; k < L; ++k) {
            double amp = 0.0;
            for (size_t i = 0; i < rrhs.size(); ++i)
                amp += cran_coef[k * rrhs.size() + i] * std::sqrt(p.at(rrhs[i], k));
            double den = s->noise_power_w;
            for (size_t b = 0; b < bss.size(); ++b)
                den += cran_intf[k * bss.size() + b] * p.at(bss[b], k);
            sum += s->w_over_l() * std::log2(1.0 + amp * amp / den);
        }
        return sum;
    }

    double bs_utility(size_t b, const PowerProfile& p) const {
        const int tx = bss[b];
        const int n_tx = static_cast<int>(p.n_tx);
        double sum = 0.0;
        for (int k = 0; k < L; ++k) {
            double den = s->noise_power_w;
            for (int t = 0; t < n_tx; ++t)
                den += bs_intf[(b * L + k) * n_tx + t] * p.at(t, k);
            sum += s->w_over_l() * std::log2(1.0 + bs_own[b * L + k] * p.at(tx, k) / den);
        }
        return sum;
    }

    // frozen CU denominators e_k from the actual HetNet powers
    std::vector<double> cu_e_from_profile(const PowerProfile& p) const {
        std::vector<double> e(L, s->noise_power_w);
        for (int k = 0; k < L; ++k)
            for (size_t b = 0; b < bss.size(); ++b)
                e[k] += cran_intf[k * bss.size() + b] * p.at(bss[b], k);
        return e;
    }

    // frozen CU denominators from believed HetNet strategies at levels < m
    std::vector<double> cu_e_from_table(const LevelStrategyTable& table,
                                        const LevelWeights& w, int m) const {
        std::vector<double> e(L, s->noise_power_w);
        for (int k = 0; k < L; ++k)
            for (size_t b = 0; b < bss.size(); ++b) {
                const double gain = cran_intf[k * bss.size() + b];
                for (int h = 0; h < m; ++h)
                    e[k] += w.at(h) * gain * table.at(bss[b], h, k);
            }
        return e;
    }

    CuProblem cu_problem(const Deployment& d, std::vector<double> e) const {
        CuProblem prob;
        prob.n_rrh = static_cast<int>(rrhs.size());
        prob.n_sub = L;
        prob.e = std::move(e);
        prob.w_over_l = s->w_over_l();
        prob.c.resize(rrhs.size() * static_cast<size_t>(L));
        for (size_t i = 0; i < rrhs.size(); ++i)
            for (int k = 0; k < L; ++k) prob.c[i * L + k] = cran_coef[k * rrhs.size() + i];
        prob.budget.resize(rrhs.size());
        for (size_t i = 0; i < rrhs.size(); ++i)
            prob.budget[i] = d.transmitters[rrhs[i]].p_max_w;
        return prob;
    }

    // Nash effective gains for BS b against the others' current powers
    std::vector<double> bs_nash_gains(size_t b, const PowerProfile& p) const {
        const int n_tx = p.n_tx;
        std::vector<double> g(L);
        for (int k = 0; k < L; ++k) {
            double den = s->noise_power_w;
            for (int t = 0; t < n_tx; ++t)
                den += bs_intf[(b * L + k) * n_tx + t] * p.at(t, k);
            g[k] = std::max(bs_own[b * L + k] / den, 1e-300);
        }
        return g;
    }

    // CH belief terms for BS b at level m, from the level table
    BsChProblem bs_ch_problem(size_t b, const Deployment& d, const LevelStrategyTable& table,
                              const LevelWeights& w, int m) const {
        const int n_tx = d.n_tx();
        BsChProblem prob;
        prob.w_over_l = s->w_over_l();
        prob.p_max = d.transmitters[bss[b]].p_max_w;
        prob.c.assign(bs_own.begin() + b * L, bs_own.begin() + (b + 1) * L);
        prob.D.resize(L);
        prob.I.resize(L);
        for (int k = 0; k < L; ++k) {
            double same = 0.0, lower = s->noise_power_w;
            for (int t = 0; t < n_tx; ++t) {
                const double gain = bs_intf[(b * L + k) * n_tx + t];
                if (gain == 0.0) continue;
                same += gain;
                for (int h = 0; h < m; ++h) lower += w.at(h) * gain * table.at(t, h, k);
            }
            prob.D[k] = w.at(m) * same;
            prob.I[k] = lower;
        }
        return prob;
    }
};

void fill_rates(EquilibriumResult& r, const LinkTables& t, const Deployment& d) {
    r.profile.validate_budget(d);
    r.type_mean.fill(0.0);
    r.type_count.fill(0);
    r.total_rate = 0.0;
    r.bs_rates.clear();

    if (!t.rrhs.empty()) {
        r.has_cu = true;
        r.cu_rate = t.cu_utility(r.profile);
        r.type_mean[static_cast<int>(RateKind::Cran)] = r.cu_rate;
        r.type_count[static_cast<int>(RateKind::Cran)] = 1;
        r.total_rate += r.cu_rate;
    }
    for (size_t b = 0; b < t.bss.size(); ++b) {
        const int tx = t.bss[b];
        const double u = t.bs_utility(b, r.profile);
        r.bs_rates.emplace_back(tx, u);
        const int kind = static_cast<int>(d.transmitters[tx].kind); // Macro=1, Pico=2, Femto=3
        r.type_mean[kind] += u;
        r.type_count[kind] += 1;
        r.total_rate += u;
    }
    for (int i = 1; i < 4; ++i)
        if (r.type_count[i] > 0) r.type_mean[i] /= r.type_count[i];
}

int level_of(TxKind k) {
    switch (k) {
        case TxKind::Femto: return 1;
        case TxKind::Pico: return 2;
        case TxKind::Macro: return 3;
        case TxKind::Rrh: return 4;
    }
    return 0;
}

} // namespace

EquilibriumResult solve_equal_power(const Scenario& s, const Deployment& d,
                                    const ChannelRealization& c) {
    s.validate();
    const auto a = make_assignment(c, d, s);
    LinkTables tables(s, c, d, a);
    EquilibriumResult r;
    r.scheme = Concept::EqualPower;
    r.profile = PowerProfile::equal_power(d, s.n_subcarriers);
    r.converged = true;
    fill_rates(r, tables, d);
    return r;
}

EquilibriumResult solve_ne(const Scenario& s, const Deployment& d, const ChannelRealization& c,
                           const EquilibriumOptions& opts) {
    s.validate();
    const auto a = make_assignment(c, d, s);
    LinkTables tables(s, c, d, a);
    const int L = s.n_subcarriers;
    const double theta = opts.damping;

    EquilibriumResult r;
    r.scheme = Concept::Ne;
    r.profile = PowerProfile::equal_power(d, L);
    r.max_residual = std::numeric_limits<double>::infinity();

    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        double delta = 0.0;

        if (!tables.rrhs.empty()) {
            const auto prob = tables.cu_problem(d, tables.cu_e_from_profile(r.profile));
            const auto sol = cu_best_response(prob, opts.inner);
            for (size_t i = 0; i < tables.rrhs.size(); ++i) {
                const int tx = tables.rrhs[i];
                const double p_max = d.transmitters[tx].p_max_w;
                for (int k = 0; k < L; ++k) {
                    const double next =
                        theta * sol.p[i * L + k] + (1.0 - theta) * r.profile.at(tx, k);
                    delta = std::max(delta, std::abs(next - r.profile.at(tx, k)) / p_max);
                    r.profile.at(tx, k) = next;
                }
            }
        }

        for (size_t b = 0; b < tables.bss.size(); ++b) {
            const int tx = tables.bss[b];
            const double p_max = d.transmitters[tx].p_max_w;
            const auto br =
                waterfill(tables.bs_nash_gains(b, r.profile), p_max, s.w_over_l(), opts.inner);
            for (int k = 0; k < L; ++k) {
                const double next = theta * br[k] + (1.0 - theta) * r.profile.at(tx, k);
                delta = std::max(delta, std::abs(next - r.profile.at(tx, k)) / p_max);
                r.profile.at(tx, k) = next;
            }
        }

        r.iterations = sweep;
        r.max_residual = delta;
        if (delta <= opts.tol_outer_rel) {
            r.converged = true;
            break;
        }
    }

    fill_rates(r, tables, d);
    return r;
}

CheSolution solve_che(const Scenario& s, const Deployment& d, const ChannelRealization& c,
                      const EquilibriumOptions& opts) {
    s.validate();
    const auto a = make_assignment(c, d, s);
    LinkTables tables(s, c, d, a);
    const int L = s.n_subcarriers;
    const int top = s.ch_top_level;

    CheSolution out;
    out.table = LevelStrategyTable(d.n_tx(), top + 1, L);

    // level 0: the non-strategic equal-power anchor
    for (const auto& t : d.transmitters)
        for (int k = 0; k < L; ++k) out.table.at(t.id, 0, k) = t.p_max_w / L;

    int inner_calls = 0;
    double worst_residual = 0.0;

    for (int h = 1; h <= top; ++h) {
        const auto w = poisson_level_weights(s.ch_tau, h);

        if (!tables.rrhs.empty()) {
            const auto prob = tables.cu_problem(d, tables.cu_e_from_table(out.table, w, h));
            CuSolution sol;
            try {
                sol = cu_best_response(prob, opts.inner);
            } catch (const SolverError& e) {
                throw SolverError("solve_che: CU failed at level " + std::to_string(h) + ": " +
                                      e.what(),
                                  e.best_iterate, e.residual, e.iterations);
            }
            ++inner_calls;
            worst_residual = std::max(worst_residual, sol.kkt_residual);
            for (size_t i = 0; i < tables.rrhs.size(); ++i)
                for (int k = 0; k < L; ++k)
                    out.table.at(tables.rrhs[i], h, k) = sol.p[i * L + k];
        }

        for (size_t b = 0; b < tables.bss.size(); ++b) {
            const auto prob = tables.bs_ch_problem(b, d, out.table, w, h);
            BsChSolution sol;
            try {
                sol = bs_ch_best_response(prob, opts.inner);
            } catch (const SolverError& e) {
                throw SolverError("solve_che: BS " + std::to_string(tables.bss[b]) +
                                      " failed at level " + std::to_string(h) + ": " + e.what(),
                                  e.best_iterate, e.residual, e.iterations);
            }
            ++inner_calls;
            worst_residual = std::max(worst_residual, sol.kkt_residual);
            for (int k = 0; k < L; ++k) out.table.at(tables.bss[b], h, k) = sol.p[k];
        }
    }

    auto& r = out.result;
    r.scheme = Concept::Che;
    r.converged = true;
    r.iterations = inner_calls;
    r.max_residual = worst_residual;
    r.profile = PowerProfile(d.n_tx(), L);
    for (const auto& t : d.transmitters) {
        const int lvl = level_of(t.kind);
        for (int k = 0; k < L; ++k) r.profile.at(t.id, k) = out.table.at(t.id, lvl, k);
    }
    fill_rates(r, tables, d);
    return out;
}

double verify_ne(const EquilibriumResult& r, const Scenario& s, const Deployment& d,
                 const ChannelRealization& c, const EquilibriumOptions& opts) {
    const auto a = make_assignment(c, d, s);
    LinkTables tables(s, c, d, a);
    const int L = s.n_subcarriers;
    double worst = 0.0;

    if (!tables.rrhs.empty()) {
        const double u_cur = tables.cu_utility(r.profile);
        const auto prob = tables.cu_problem(d, tables.cu_e_from_profile(r.profile));
        const auto sol = cu_best_response(prob, opts.inner);
        PowerProfile dev = r.profile;
        for (size_t i = 0; i < tables.rrhs.size(); ++i)
            for (int k = 0; k < L; ++k) dev.at(tables.rrhs[i], k) = sol.p[i * L + k];
        const double u_br = tables.cu_utility(dev);
        worst = std::max(worst, (u_br - u_cur) / std::max(u_cur, kImprovementEps));
    }

    for (size_t b = 0; b < tables.bss.size(); ++b) {
        const int tx = tables.bss[b];
        const double u_cur = tables.bs_utility(b, r.profile);
        const auto br = waterfill(tables.bs_nash_gains(b, r.profile),
                                  d.transmitters[tx].p_max_w, s.w_over_l(), opts.inner);
        PowerProfile dev = r.profile;
        dev.set_row(tx, br);
        const double u_br = tables.bs_utility(b, dev);
        worst = std::max(worst, (u_br - u_cur) / std::max(u_cur, kImprovementEps));
    }
    return std::max(worst, 0.0);
}

double verify_che(const EquilibriumResult& r, const LevelStrategyTable& table, const Scenario& s,
                  const Deployment& d, const ChannelRealization& c,
                  const EquilibriumOptions& opts) {
    const auto a = make_assignment(c, d, s);
    LinkTables tables(s, c, d, a);
    const int L = s.n_subcarriers;
    double worst = 0.0;

    if (!tables.rrhs.empty()) {
        const auto w = poisson_level_weights(s.ch_tau, s.ch_top_level);
        const auto prob =
            tables.cu_problem(d, tables.cu_e_from_table(table, w, s.ch_top_level));
        std::vector<double> played(tables.rrhs.size() * static_cast<size_t>(L));
        for (size_t i = 0; i < tables.rrhs.size(); ++i)
            for (int k = 0; k < L; ++k) played[i * L + k] = r.profile.at(tables.rrhs[i], k);
        const double u_cur = cu_objective(prob, played);
        const auto sol = cu_best_response(prob, opts.inner);
        worst = std::max(worst,
                         (sol.objective - u_cur) / std::max(u_cur, kImprovementEps));
    }

    for (size_t b = 0; b < tables.bss.size(); ++b) {
        const int tx = tables.bss[b];
        const int m = level_of(d.transmitters[tx].kind);
        const auto w = poisson_level_weights(s.ch_tau, m);
        const auto prob = tables.bs_ch_problem(b, d, table, w, m);
        const double u_cur = bs_ch_objective(prob, r.profile.row(tx));
        const auto sol = bs_ch_best_response(prob, opts.inner);
        worst = std::max(worst,
                         (sol.objective - u_cur) / std::max(u_cur, kImprovementEps));
    }
    return std::max(worst, 0.0);
}

std::string result_to_json(const EquilibriumResult& r, const Deployment& d) {
    nlohmann::json j;
    j["concept"] = concept_name(r.scheme);
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["max_residual"] = r.max_residual;
    nlohmann::json prof = nlohmann::json::object();
    for (const auto& t : d.transmitters) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < r.profile.n_sub; ++k) row.push_back(r.profile.at(t.id, k));
        prof[std::to_string(t.id)] = {{"kind", tx_kind_name(t.kind)}, {"p_w", row}};
    }
    j["profile"] = prof;
    nlohmann::json rates = nlohmann::json::object();
    if (r.has_cu) rates["cu"] = r.cu_rate;
    nlohmann::json bs = nlohmann::json::object();
    for (const auto& [tx, u] : r.bs_rates) bs[std::to_string(tx)] = u;
    rates["bs"] = bs;
    j["rates_bps"] = rates;
    nlohmann::json types = nlohmann::json::object();
    for (int i = 0; i < 4; ++i)
        if (r.type_count[i] > 0)
            types[rate_kind_name(static_cast<RateKind>(i))] = r.type_mean[i];
    types["Total"] = r.total_rate;
    j["per_type_bps"] = types;
    return j.dump(2);
}

std::string table_to_json(const LevelStrategyTable& t, const Deployment& d) {
    nlohmann::json players = nlohmann::json::object();
    for (const auto& tx : d.transmitters) {
        nlohmann::json levels = nlohmann::json::array();
        for (int h = 0; h < t.n_levels; ++h) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < t.n_sub; ++k) row.push_back(t.at(tx.id, h, k));
            levels.push_back(row);
        }
        players[std::to_string(tx.id)] = {{"kind", tx_kind_name(tx.kind)},
                                          {"levels", levels}};
    }
    nlohmann::json j;
    j["players"] = players;
    return j.dump(2);
}

} // namespace cranhet
