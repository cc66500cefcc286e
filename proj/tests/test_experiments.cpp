#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <charconv>
#include <cmath>

#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/rng.hpp"

using namespace cranhet;

namespace {

SweepSpec tiny_spec() {
    SweepSpec spec;
    spec.variable = SweepVariable::NRrh;
    spec.values = {2, 3};
    spec.n_realizations = 3;
    spec.base_seed = 11;
    spec.concepts = {Concept::Ne, Concept::Che, Concept::EqualPower};
    spec.scenario = desk_scenario();
    spec.scenario.n_subcarriers = 2;
    spec.scenario.n_cran_users = 4;
    spec.scenario.users_per_macro = 3;
    return spec;
}

const SweepRow* find_row(const SweepResult& r, double value, Concept scheme, RateKind kind) {
    for (const auto& row : r.rows)
        if (row.value == value && row.scheme == scheme && row.kind == kind) return &row;
    return nullptr;
}

} // namespace

TEST_CASE("format_double round-trips") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double v = std::exp(rng.uniform(-20.0, 20.0)) * (rng.uniform01() < 0.5 ? -1 : 1);
        const std::string s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("sweep spec parsing") {
    const std::string text = R"(
# desk sweep
variable = n_rrh
values = 2, 4, 6, 8
realizations = 5
seed = 42
concepts = ne che equal
scenario.n_subcarriers = 2
scenario.p_max_rrh_w = 30 dbm
)";
    const auto spec = parse_sweep_spec(text, desk_scenario());
    CHECK(spec.variable == SweepVariable::NRrh);
    CHECK(spec.values == std::vector<double>{2, 4, 6, 8});
    CHECK(spec.n_realizations == 5);
    CHECK(spec.base_seed == 42);
    REQUIRE(spec.concepts.size() == 3);
    CHECK(spec.scenario.n_subcarriers == 2);
    CHECK(spec.scenario.p_max_rrh_w == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(parse_sweep_spec("bogus = 1\n", desk_scenario()), ParseError);
    CHECK_THROWS_AS(parse_sweep_spec("variable = n_rrh\nvariable = n_rrh\n", desk_scenario()),
                    ParseError);
    CHECK_THROWS_AS(parse_sweep_spec("variable = uplink\n", desk_scenario()), ParseError);
    // strictly increasing values
    CHECK_THROWS_AS(
        parse_sweep_spec("values = 4, 2\nconcepts = ne\n", desk_scenario()),
        InvalidArgError);
    // empty concepts
    CHECK_THROWS_AS(parse_sweep_spec("values = 2\nconcepts =\n", desk_scenario()),
                    InvalidArgError);
    CHECK_THROWS_AS(load_sweep_spec("/nonexistent/spec", desk_scenario()), IoError);
}

TEST_CASE("seed derivation is a pure injective-ish mix") {
    CHECK(sweep_seed(1, 0, 0, 0) == sweep_seed(1, 0, 0, 0));
    CHECK(sweep_seed(1, 0, 0, 0) != sweep_seed(1, 0, 0, 1));
    CHECK(sweep_seed(1, 0, 1, 0) != sweep_seed(1, 1, 0, 0));
    CHECK(sweep_seed(1, 0, 0, 0) != sweep_seed(2, 0, 0, 0));
}

TEST_CASE("degenerate sweep equals a direct solve") {
    SweepSpec spec = tiny_spec();
    spec.values = {3};
    spec.n_realizations = 1;
    spec.concepts = {Concept::EqualPower};
    const auto result = run_sweep(spec);
    CHECK(result.n_failed == 0);

    const Scenario s = scenario_for_value(spec, 0);
    const auto d = sample_deployment(s, sweep_seed(spec.base_seed, 0, 0, 0));
    const auto c = sample_channels(d, s, sweep_seed(spec.base_seed, 0, 0, 1));
    const auto direct = solve_equal_power(s, d, c);

    const auto* cran = find_row(result, 3, Concept::EqualPower, RateKind::Cran);
    REQUIRE(cran != nullptr);
    CHECK(cran->mean_rate == direct.cu_rate);
    CHECK(cran->std_rate == 0.0);
    CHECK(cran->n == 1);
    const auto* total = find_row(result, 3, Concept::EqualPower, RateKind::Total);
    REQUIRE(total != nullptr);
    CHECK(total->mean_rate == direct.total_rate);
}

TEST_CASE("sweep determinism and execution-order invariance") {
    const SweepSpec spec = tiny_spec();
    const auto r1 = run_sweep(spec);
    const auto r2 = run_sweep(spec);
    CHECK(emit_csv(r1) == emit_csv(r2));
    CHECK(r1.rows == r2.rows);

    // shuffled cell-by-cell execution reproduces the canonical cells
    std::vector<SweepCell> cells;
    for (int vi = static_cast<int>(spec.values.size()) - 1; vi >= 0; --vi)
        for (int ri = spec.n_realizations - 1; ri >= 0; --ri)
            for (auto it = spec.concepts.rbegin(); it != spec.concepts.rend(); ++it)
                cells.push_back(solve_cell(spec, vi, ri, *it));
    for (const auto& cell : cells) {
        const auto match = std::find_if(r1.cells.begin(), r1.cells.end(), [&](const SweepCell& c) {
            return c.value_index == cell.value_index && c.realization == cell.realization &&
                   c.scheme == cell.scheme;
        });
        REQUIRE(match != r1.cells.end());
        CHECK(match->total == cell.total);
        CHECK(match->type_mean == cell.type_mean);
    }
}

TEST_CASE("aggregates recompute from stored cells") {
    const SweepSpec spec = tiny_spec();
    const auto r = run_sweep(spec);
    CHECK(r.n_failed == 0);
    for (const auto& row : r.rows) {
        const int vi = row.value == spec.values[0] ? 0 : 1;
        double sum = 0.0;
        int n = 0;
        for (const auto& cell : r.cells) {
            if (cell.value_index != vi || cell.scheme != row.scheme || !cell.ok) continue;
            sum += row.kind == RateKind::Total ? cell.total
                                               : cell.type_mean[static_cast<int>(row.kind)];
            ++n;
        }
        REQUIRE(n == row.n);
        CHECK(row.mean_rate == doctest::Approx(sum / n).epsilon(1e-12));
    }
}

TEST_CASE("per-group Total equals the sum of per-type totals") {
    const SweepSpec spec = tiny_spec();
    const auto r = run_sweep(spec);
    for (double value : spec.values) {
        for (Concept scheme : spec.concepts) {
            const auto* total = find_row(r, value, scheme, RateKind::Total);
            REQUIRE(total != nullptr);
            double sum = 0.0;
            const int counts[4] = {1, spec.scenario.n_macro, spec.scenario.n_pico,
                                   spec.scenario.n_femto};
            for (int t = 0; t < 4; ++t) {
                const auto* row = find_row(r, value, scheme, static_cast<RateKind>(t));
                REQUIRE(row != nullptr);
                sum += row->mean_rate * counts[t];
            }
            CHECK(std::abs(total->mean_rate - sum) <= 1e-9 * total->mean_rate);
        }
    }
}

TEST_CASE("CSV emission") {
    SUBCASE("empty result gives a header-only file") {
        SweepResult empty;
        CHECK(emit_csv(empty) == "variable,value,concept,kind,mean_rate_bps,std_rate_bps,n\n");
    }
    SUBCASE("single row gives a two-line file") {
        SweepResult r;
        r.variable = SweepVariable::PMaxRrh;
        SweepRow row;
        row.value = 1.5;
        row.scheme = Concept::Ne;
        row.kind = RateKind::Total;
        row.mean_rate = 12345.6789;
        row.std_rate = 17.25;
        row.n = 50;
        r.rows.push_back(row);
        const std::string csv = emit_csv(r);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
        CHECK(csv.find("p_max_rrh,1.5,ne,Total,12345.6789,17.25,50\n") != std::string::npos);
        const auto back = parse_sweep_csv(csv);
        CHECK(back.variable == r.variable);
        REQUIRE(back.rows.size() == 1);
        CHECK(back.rows[0] == r.rows[0]);
    }
    SUBCASE("sweep result round-trips exactly") {
        const auto r = run_sweep(tiny_spec());
        const auto back = parse_sweep_csv(emit_csv(r));
        CHECK(back.variable == r.variable);
        CHECK(back.rows == r.rows);
    }
    SUBCASE("rows are sorted by value, concept, kind") {
        const auto r = run_sweep(tiny_spec());
        const std::string csv = emit_csv(r);
        // first data row: lowest value, concept che, kind CRAN
        CHECK(csv.find("n_rrh,2,che,CRAN,") != std::string::npos);
        const size_t header_end = csv.find('\n');
        CHECK(csv.find("n_rrh,2,che,CRAN,") == header_end + 1);
        // within a group: CRAN < Femto < Macro < Pico < Total
        CHECK(csv.find("n_rrh,2,che,CRAN,") < csv.find("n_rrh,2,che,Femto,"));
        CHECK(csv.find("n_rrh,2,che,Femto,") < csv.find("n_rrh,2,che,Macro,"));
        CHECK(csv.find("n_rrh,2,che,Macro,") < csv.find("n_rrh,2,che,Pico,"));
        CHECK(csv.find("n_rrh,2,che,Pico,") < csv.find("n_rrh,2,che,Total,"));
        // concepts: che < equal < ne
        CHECK(csv.find("n_rrh,2,che,") < csv.find("n_rrh,2,equal,"));
        CHECK(csv.find("n_rrh,2,equal,") < csv.find("n_rrh,2,ne,"));
        // values ascending
        CHECK(csv.find("n_rrh,2,") < csv.find("n_rrh,3,"));
    }
    SUBCASE("malformed CSV is rejected") {
        CHECK_THROWS_AS(parse_sweep_csv("wrong,header\n"), ParseError);
        CHECK_THROWS_AS(
            parse_sweep_csv("variable,value,concept,kind,mean_rate_bps,std_rate_bps,n\nx\n"),
            ParseError);
    }
}

TEST_CASE("p_max_rrh sweeps apply the value in watts") {
    SweepSpec spec = tiny_spec();
    spec.variable = SweepVariable::PMaxRrh;
    spec.values = {0.5, 2.0};
    const Scenario s0 = scenario_for_value(spec, 0);
    CHECK(s0.p_max_rrh_w == 0.5);
    CHECK(s0.n_rrh == spec.scenario.n_rrh);
    const Scenario s1 = scenario_for_value(spec, 1);
    CHECK(s1.p_max_rrh_w == 2.0);

    SweepSpec bad = tiny_spec();
    bad.values = {2.5, 3.0}; // n_rrh must be integral
    CHECK_THROWS_AS(scenario_for_value(bad, 0), InvalidArgError);
}

TEST_CASE("verify report over a few seeds") {
    Scenario s = desk_scenario();
    s.n_subcarriers = 2;
    const auto report = run_verify(s, 100, 3, 1e-6);
    REQUIRE(report.lines.size() == 3);
    for (const auto& line : report.lines) CHECK(line.che_improvement <= 1e-6);
    CHECK(report.pass());
    const std::string text = report.text();
    CHECK(text.find("result=PASS") != std::string::npos);
    CHECK(text.find("seed=100") != std::string::npos);
}
