#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "core/equilibrium.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "net_fixtures.hpp"
#include "oracles.hpp"

using namespace cranhet;
using fixtures::NetBuilder;

namespace {

std::vector<std::vector<double>> profile_rows(const PowerProfile& p) {
    std::vector<std::vector<double>> rows(p.n_tx);
    for (int t = 0; t < p.n_tx; ++t) rows[t] = p.row(t);
    return rows;
}

// Full independent re-evaluation of a player's utility from the raw data.
double oracle_player_rate(const Scenario& s, const ChannelRealization& c, const Deployment& d,
                          const Assignment& a, const PowerProfile& p, bool is_cu, int tx) {
    const auto rows = profile_rows(p);
    double sum = 0.0;
    for (int k = 0; k < s.n_subcarriers; ++k) {
        if (is_cu) sum += oracle::eval_cran_rate(s, c, d, a.cran_user[k], k, rows);
        else sum += oracle::eval_bs_rate(s, c, d, tx, a.bs_user_at(tx, k), k, rows);
    }
    return sum;
}

} // namespace

TEST_CASE("solve_equal_power") {
    const Scenario s = desk_scenario();
    const Deployment d = sample_deployment(s, 1);
    const auto c = sample_channels(d, s, 1);
    const auto r = solve_equal_power(s, d, c);

    SUBCASE("flat, budget-exact slices") {
        CHECK(r.converged);
        for (const auto& t : d.transmitters)
            for (int k = 0; k < s.n_subcarriers; ++k)
                CHECK(r.profile.at(t.id, k) == t.p_max_w / s.n_subcarriers);
        CHECK_NOTHROW(r.profile.validate_budget(d));
    }

    SUBCASE("rates match an independent re-evaluation") {
        const auto a = make_assignment(c, d, s);
        const double cu = oracle_player_rate(s, c, d, a, r.profile, true, -1);
        CHECK(r.cu_rate == doctest::Approx(cu).epsilon(1e-9));
        double total = cu;
        for (const auto& [tx, rate] : r.bs_rates) {
            const double expect = oracle_player_rate(s, c, d, a, r.profile, false, tx);
            CHECK(rate == doctest::Approx(expect).epsilon(1e-9));
            total += expect;
        }
        CHECK(r.total_rate == doctest::Approx(total).epsilon(1e-9));
        CHECK(r.kind_rate(RateKind::Total) == r.total_rate);
        CHECK(r.kind_rate(RateKind::Cran) == r.cu_rate);
    }

    SUBCASE("per-type means average the player utilities") {
        double femto_sum = 0.0;
        int femto_n = 0;
        for (const auto& [tx, rate] : r.bs_rates)
            if (d.transmitters[tx].kind == TxKind::Femto) {
                femto_sum += rate;
                ++femto_n;
            }
        REQUIRE(femto_n == 2);
        CHECK(r.kind_rate(RateKind::Femto) == doctest::Approx(femto_sum / femto_n).epsilon(1e-12));
    }
}

TEST_CASE("single-subcarrier game is concept-independent") {
    Scenario s = desk_scenario();
    s.n_subcarriers = 1;
    const Deployment d = sample_deployment(s, 2);
    const auto c = sample_channels(d, s, 2);
    const auto eq = solve_equal_power(s, d, c);
    const auto ne = solve_ne(s, d, c);
    const auto che = solve_che(s, d, c);
    CHECK(ne.converged);
    for (const auto& t : d.transmitters) {
        CHECK(ne.profile.at(t.id, 0) == doctest::Approx(t.p_max_w).epsilon(1e-12));
        CHECK(che.result.profile.at(t.id, 0) == doctest::Approx(t.p_max_w).epsilon(1e-12));
        CHECK(eq.profile.at(t.id, 0) == t.p_max_w);
    }
}

TEST_CASE("solve_ne on a single BS without CRAN lands on its water-filling point") {
    Scenario s = desk_scenario();
    s.n_subcarriers = 4;
    s.noise_power_w = 1e-8;
    NetBuilder b(s);
    const int bs = b.add_tx(TxKind::Macro, 1000, 1000, 5.0);
    b.add_user(bs, 1100, 1000);
    const auto d = b.deployment();
    const auto c = sample_channels(d, s, 9);
    const auto r = solve_ne(s, d, c);
    CHECK(r.converged);
    CHECK_FALSE(r.has_cu);

    const auto a = make_assignment(c, d, s);
    const auto wf = nash_bs_best_response(s, c, d, a, r.profile, bs);
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(r.profile.at(bs, k) - wf[k]) <= 1e-5 * 5.0);

    SUBCASE("verify_ne reports ~0 for the single player") {
        CHECK(verify_ne(r, s, d, c) <= 1e-6);
    }
}

TEST_CASE("far-separated BSs decouple to isolated water-filling") {
    Scenario s = desk_scenario();
    s.n_subcarriers = 2;
    s.noise_power_w = 1e-6; // dominates the residual cross-grid interference
    NetBuilder b(s);
    const int bs1 = b.add_tx(TxKind::Femto, 0, 0, 0.1);
    const int bs2 = b.add_tx(TxKind::Femto, 3000, 3000, 0.1);
    b.add_user(bs1, 5, 0);
    b.add_user(bs2, 3005, 3000);
    const auto d = b.deployment();
    const auto c = sample_channels(d, s, 31);
    const auto r = solve_ne(s, d, c);
    CHECK(r.converged);

    const auto a = make_assignment(c, d, s);
    for (int tx : {bs1, bs2}) {
        const int u = a.bs_user_at(tx, 0);
        std::vector<double> gains(2);
        for (int k = 0; k < 2; ++k)
            gains[k] = c.gain_abs2(tx, u, k) * std::pow(d.distance(tx, u), -3.0) /
                       s.noise_power_w;
        const auto isolated = waterfill(gains, 0.1, s.w_over_l());
        for (int k = 0; k < 2; ++k)
            CHECK(std::abs(r.profile.at(tx, k) - isolated[k]) <= 1e-3 * 0.1);
    }
}

TEST_CASE("desk-scale NE certificate") {
    const Scenario s = desk_scenario();
    const Deployment d = sample_deployment(s, 5);
    const auto c = sample_channels(d, s, 5);
    const auto r = solve_ne(s, d, c);
    CHECK_NOTHROW(r.profile.validate_budget(d));
    if (r.converged) CHECK(verify_ne(r, s, d, c) <= 1e-6);

    SUBCASE("equal power is not an equilibrium under interference") {
        const auto eq = solve_equal_power(s, d, c);
        CHECK(verify_ne(eq, s, d, c) > 1e-3);
    }
}

TEST_CASE("solve_che femtos-only network plays level-1 against equal power") {
    Scenario s = desk_scenario();
    s.n_subcarriers = 3;
    NetBuilder b(s);
    const int f1 = b.add_tx(TxKind::Femto, 100, 100, 0.1);
    const int f2 = b.add_tx(TxKind::Femto, 150, 100, 0.1);
    const int f3 = b.add_tx(TxKind::Femto, 120, 160, 0.1);
    b.add_user(f1, 102, 100);
    b.add_user(f2, 150, 103);
    b.add_user(f3, 118, 160);
    const auto d = b.deployment();
    const auto c = sample_channels(d, s, 77);
    const auto che = solve_che(s, d, c);
    const auto a = make_assignment(c, d, s);

    const auto w1 = poisson_level_weights(s.ch_tau, 1);
    LevelStrategyTable level0(d.n_tx(), 5, 3);
    for (const auto& t : d.transmitters)
        for (int k = 0; k < 3; ++k) level0.at(t.id, 0, k) = t.p_max_w / 3;

    for (int tx : {f1, f2, f3}) {
        // rebuild the level-1 belief terms from the public pieces
        BsChProblem prob;
        prob.w_over_l = s.w_over_l();
        prob.p_max = 0.1;
        prob.c.resize(3);
        prob.D.resize(3);
        prob.I.resize(3);
        for (int k = 0; k < 3; ++k) {
            const int u = a.bs_user_at(tx, k);
            prob.c[k] = c.gain_abs2(tx, u, k) * std::pow(d.distance(tx, u), -3.0);
            const double e0 =
                ch_expected_interference(s, c, d, a, {false, tx}, 1, w1, level0, k, 0.0);
            const double e1 =
                ch_expected_interference(s, c, d, a, {false, tx}, 1, w1, level0, k, 1.0);
            prob.D[k] = e1 - e0;
            prob.I[k] = s.noise_power_w + e0;
        }
        const auto expect = bs_ch_best_response(prob);
        for (int k = 0; k < 3; ++k) {
            CHECK(che.result.profile.at(tx, k) ==
                  doctest::Approx(expect.p[k]).epsilon(1e-9));
            CHECK(che.table.at(tx, 1, k) == che.result.profile.at(tx, k));
        }
    }
}

TEST_CASE("CHE level table matches an independent reconstruction") {
    // Rebuild the whole recursion from the public pieces alone: level-0 equal
    // power, then per level the belief terms via ch_expected_interference and
    // the per-player solvers, writing into a separate table.
    Scenario s = desk_scenario();
    s.n_subcarriers = 3;
    const Deployment d = sample_deployment(s, 42);
    const auto c = sample_channels(d, s, 43);
    const auto che = solve_che(s, d, c);
    const auto a = make_assignment(c, d, s);
    const int L = s.n_subcarriers;

    LevelStrategyTable mine(d.n_tx(), 5, L);
    for (const auto& t : d.transmitters)
        for (int k = 0; k < L; ++k) mine.at(t.id, 0, k) = t.p_max_w / L;

    for (int h = 1; h <= 4; ++h) {
        const auto w = poisson_level_weights(s.ch_tau, h);
        LevelStrategyTable next = mine;

        CuProblem cu;
        cu.n_rrh = static_cast<int>(d.rrh_ids().size());
        cu.n_sub = L;
        cu.w_over_l = s.w_over_l();
        cu.c.resize(static_cast<size_t>(cu.n_rrh) * L);
        cu.e.resize(L);
        cu.budget.assign(cu.n_rrh, s.p_max_rrh_w);
        for (int k = 0; k < L; ++k) {
            const int j = a.cran_user[k];
            for (int i = 0; i < cu.n_rrh; ++i)
                cu.c[static_cast<size_t>(i) * L + k] =
                    c.gain_abs(i, j, k) *
                    std::sqrt(std::pow(d.distance(i, j), -s.pathloss_exponent));
            cu.e[k] = s.noise_power_w +
                      ch_expected_interference(s, c, d, a, {true, -1}, h, w, mine, k, 0.0);
        }
        const auto cu_sol = cu_best_response(cu);
        for (int i = 0; i < cu.n_rrh; ++i)
            for (int k = 0; k < L; ++k) next.at(i, h, k) = cu_sol.p[static_cast<size_t>(i) * L + k];

        for (int tx : d.bs_ids()) {
            BsChProblem prob;
            prob.w_over_l = s.w_over_l();
            prob.p_max = d.transmitters[tx].p_max_w;
            prob.c.resize(L);
            prob.D.resize(L);
            prob.I.resize(L);
            for (int k = 0; k < L; ++k) {
                const int u = a.bs_user_at(tx, k);
                prob.c[k] = c.gain_abs2(tx, u, k) *
                            std::pow(d.distance(tx, u), -s.pathloss_exponent);
                const double e0 =
                    ch_expected_interference(s, c, d, a, {false, tx}, h, w, mine, k, 0.0);
                const double e1 =
                    ch_expected_interference(s, c, d, a, {false, tx}, h, w, mine, k, 1.0);
                prob.D[k] = e1 - e0;
                prob.I[k] = s.noise_power_w + e0;
            }
            const auto sol = bs_ch_best_response(prob);
            for (int k = 0; k < L; ++k) next.at(tx, h, k) = sol.p[k];
        }
        mine = next;
    }

    for (const auto& t : d.transmitters)
        for (int h = 0; h <= 4; ++h)
            for (int k = 0; k < L; ++k)
                CHECK(std::abs(mine.at(t.id, h, k) - che.table.at(t.id, h, k)) <=
                      1e-6 * t.p_max_w);

    // played profile takes femto=1, pico=2, macro=3, CU=4
    for (const auto& t : d.transmitters) {
        const int lvl = t.kind == TxKind::Femto  ? 1
                        : t.kind == TxKind::Pico ? 2
                        : t.kind == TxKind::Macro ? 3
                                                  : 4;
        for (int k = 0; k < L; ++k)
            CHECK(che.result.profile.at(t.id, k) == che.table.at(t.id, lvl, k));
    }
}

TEST_CASE("tau -> 0 reduces CHE to best responses against equal power") {
    Scenario s = desk_scenario();
    s.ch_tau = 1e-9;
    const Deployment d = sample_deployment(s, 21);
    const auto c = sample_channels(d, s, 21);
    const auto che = solve_che(s, d, c);
    const auto a = make_assignment(c, d, s);
    const auto eq = PowerProfile::equal_power(d, s.n_subcarriers);

    for (int tx : d.bs_ids()) {
        const auto wf = nash_bs_best_response(s, c, d, a, eq, tx);
        for (int k = 0; k < s.n_subcarriers; ++k)
            CHECK(std::abs(che.result.profile.at(tx, k) - wf[k]) <=
                  1e-6 * d.transmitters[tx].p_max_w);
    }
}

TEST_CASE("desk-scale CHE certificate and diagnostics") {
    const Scenario s = desk_scenario();
    const Deployment d = sample_deployment(s, 6);
    const auto c = sample_channels(d, s, 6);
    const auto che = solve_che(s, d, c);

    SUBCASE("certificate holds unconditionally") {
        CHECK(verify_che(che.result, che.table, s, d, c) <= 1e-6);
        CHECK(che.result.converged);
    }
    SUBCASE("one-shot recursion: players x 4 inner solves") {
        const int players = 1 + static_cast<int>(d.bs_ids().size());
        CHECK(che.result.iterations == players * 4);
    }
    SUBCASE("level table is deterministic and budget-feasible per level") {
        const auto again = solve_che(s, d, c);
        CHECK(again.table == che.table);
        CHECK(again.result.profile == che.result.profile);
        for (const auto& t : d.transmitters)
            for (int h = 0; h < 5; ++h) {
                double sum = 0.0;
                for (int k = 0; k < s.n_subcarriers; ++k) {
                    CHECK(che.table.at(t.id, h, k) >= 0.0);
                    sum += che.table.at(t.id, h, k);
                }
                CHECK(sum == doctest::Approx(t.p_max_w).epsilon(1e-9));
            }
    }
    SUBCASE("equal power is not a CHE") {
        auto fake = che.result;
        fake.profile = PowerProfile::equal_power(d, s.n_subcarriers);
        CHECK(verify_che(fake, che.table, s, d, c) > 1e-3);
    }
    SUBCASE("realized rates use true interference, not beliefs") {
        const auto a = make_assignment(c, d, s);
        const double cu = oracle_player_rate(s, c, d, a, che.result.profile, true, -1);
        CHECK(che.result.cu_rate == doctest::Approx(cu).epsilon(1e-9));
        for (const auto& [tx, rate] : che.result.bs_rates)
            CHECK(rate ==
                  doctest::Approx(oracle_player_rate(s, c, d, a, che.result.profile, false, tx))
                      .epsilon(1e-9));
    }
}

TEST_CASE("NE dynamics report non-convergence instead of failing") {
    Scenario s = desk_scenario();
    const Deployment d = sample_deployment(s, 4);
    const auto c = sample_channels(d, s, 4);
    EquilibriumOptions opts;
    opts.max_sweeps = 1; // starved on purpose
    const auto r = solve_ne(s, d, c, opts);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.max_residual > 0.0);
    CHECK_NOTHROW(r.profile.validate_budget(d));
}

TEST_CASE("JSON dumps are well-formed") {
    const Scenario s = desk_scenario();
    const Deployment d = sample_deployment(s, 10);
    const auto c = sample_channels(d, s, 10);
    const auto che = solve_che(s, d, c);

    const auto rj = nlohmann::json::parse(result_to_json(che.result, d));
    CHECK(rj["concept"] == "che");
    CHECK(rj["converged"] == true);
    CHECK(rj["profile"].size() == static_cast<size_t>(d.n_tx()));
    CHECK(rj["per_type_bps"].contains("Total"));

    const auto tj = nlohmann::json::parse(table_to_json(che.table, d));
    CHECK(tj["players"].size() == static_cast<size_t>(d.n_tx()));
    CHECK(tj["players"]["0"]["levels"].size() == 5);
}
