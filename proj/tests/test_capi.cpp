// Exercises the shared-library surface the way an external client would:
// only cranhet.h, opaque handles, status codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "cranhet.h"

namespace {

struct Scenario {
    crh_scenario* ptr = nullptr;
    ~Scenario() { crh_scenario_free(ptr); }
};

struct Result {
    crh_result* ptr = nullptr;
    ~Result() { crh_result_free(ptr); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("version and status strings") {
    CHECK(std::string(crh_version()).find('.') != std::string::npos);
    CHECK(std::string(crh_status_name(CRH_OK)) == "ok");
    CHECK(std::string(crh_status_name(CRH_EPARSE)) == "parse error");
}

TEST_CASE("scenario handle lifecycle and errors") {
    Scenario s;
    REQUIRE(crh_scenario_default(&s.ptr) == CRH_OK);

    double v = 0;
    CHECK(crh_scenario_get(s.ptr, "n_rrh", &v) == CRH_OK);
    CHECK(v == 4);
    CHECK(crh_scenario_set(s.ptr, "n_rrh", "6") == CRH_OK);
    CHECK(crh_scenario_get(s.ptr, "n_rrh", &v) == CRH_OK);
    CHECK(v == 6);
    CHECK(crh_scenario_set(s.ptr, "p_max_rrh_w", "33 dbm") == CRH_OK);
    CHECK(crh_scenario_get(s.ptr, "p_max_rrh_w", &v) == CRH_OK);
    CHECK(v == doctest::Approx(1.9952623149688795).epsilon(1e-12));

    CHECK(crh_scenario_set(s.ptr, "no_such_key", "1") == CRH_EPARSE);
    CHECK(std::string(crh_last_error()).find("no_such_key") != std::string::npos);
    CHECK(crh_scenario_set(s.ptr, "ch_tau", "0") == CRH_EINVAL);
    CHECK(crh_scenario_get(s.ptr, "bogus", &v) == CRH_EINVAL);

    crh_scenario* missing = nullptr;
    CHECK(crh_scenario_load("/nonexistent/file.scn", &missing) == CRH_EIO);
    CHECK(crh_scenario_default(nullptr) == CRH_EINVAL);
}

TEST_CASE("solve / verify / json through the C surface") {
    Scenario s;
    REQUIRE(crh_scenario_default(&s.ptr) == CRH_OK);
    REQUIRE(crh_scenario_set(s.ptr, "n_subcarriers", "2") == CRH_OK);

    crh_solve_opts opts;
    crh_solve_opts_init(&opts);

    SUBCASE("equal power baseline") {
        Result r;
        REQUIRE(crh_solve(s.ptr, 7, CRH_CONCEPT_EQUAL, &opts, &r.ptr) == CRH_OK);
        CHECK(crh_result_converged(r.ptr) == 1);
        const double total = crh_result_kind_rate(r.ptr, CRH_KIND_TOTAL);
        CHECK(total > 0);
        for (crh_kind k : {CRH_KIND_CRAN, CRH_KIND_MACRO, CRH_KIND_PICO, CRH_KIND_FEMTO})
            CHECK(crh_result_kind_rate(r.ptr, k) > 0);
    }

    SUBCASE("NE and certificate") {
        Result r;
        REQUIRE(crh_solve(s.ptr, 7, CRH_CONCEPT_NE, &opts, &r.ptr) == CRH_OK);
        if (crh_result_converged(r.ptr)) {
            double improvement = -1;
            REQUIRE(crh_result_verify(r.ptr, &improvement) == CRH_OK);
            CHECK(improvement <= 1e-6);
        }
        CHECK(crh_result_iterations(r.ptr) >= 1);
        CHECK(crh_result_max_residual(r.ptr) >= 0);
    }

    SUBCASE("CHE, certificate and JSON dump") {
        Result r;
        REQUIRE(crh_solve(s.ptr, 7, CRH_CONCEPT_CHE, &opts, &r.ptr) == CRH_OK);
        double improvement = -1;
        REQUIRE(crh_result_verify(r.ptr, &improvement) == CRH_OK);
        CHECK(improvement <= 1e-6);

        char* json = nullptr;
        REQUIRE(crh_result_to_json(r.ptr, &json) == CRH_OK);
        const std::string text(json);
        crh_string_free(json);
        CHECK(text.find("\"concept\": \"che\"") != std::string::npos);
        CHECK(text.find("\"level_table\"") != std::string::npos);
    }

    SUBCASE("determinism across repeated solves") {
        Result a, b;
        REQUIRE(crh_solve(s.ptr, 99, CRH_CONCEPT_CHE, &opts, &a.ptr) == CRH_OK);
        REQUIRE(crh_solve(s.ptr, 99, CRH_CONCEPT_CHE, &opts, &b.ptr) == CRH_OK);
        CHECK(crh_result_kind_rate(a.ptr, CRH_KIND_TOTAL) ==
              crh_result_kind_rate(b.ptr, CRH_KIND_TOTAL));
    }

    SUBCASE("tau override changes the CH outcome") {
        crh_solve_opts low_tau = opts;
        low_tau.tau_override = 1e-6;
        Result a, b;
        REQUIRE(crh_solve(s.ptr, 5, CRH_CONCEPT_CHE, &opts, &a.ptr) == CRH_OK);
        REQUIRE(crh_solve(s.ptr, 5, CRH_CONCEPT_CHE, &low_tau, &b.ptr) == CRH_OK);
        CHECK(crh_result_kind_rate(a.ptr, CRH_KIND_TOTAL) !=
              crh_result_kind_rate(b.ptr, CRH_KIND_TOTAL));
    }
}

TEST_CASE("sweep and verify suite through the C surface") {
    const char* spec_path = "capi_sweep_spec.txt";
    {
        std::ofstream out(spec_path);
        out << "variable = n_rrh\nvalues = 2, 3\nrealizations = 2\nseed = 3\n"
            << "concepts = equal, che\nscenario.n_subcarriers = 2\n"
            << "scenario.n_cran_users = 4\n";
    }
    CHECK(crh_sweep_run(spec_path, nullptr, "capi_sweep_a.csv") == CRH_OK);
    CHECK(crh_sweep_run(spec_path, nullptr, "capi_sweep_b.csv") == CRH_OK);
    const std::string a = slurp("capi_sweep_a.csv");
    CHECK(a == slurp("capi_sweep_b.csv"));
    CHECK(a.rfind("variable,value,concept,kind,mean_rate_bps,std_rate_bps,n\n", 0) == 0);
    CHECK(a.find("n_rrh,2,che,CRAN,") != std::string::npos);

    CHECK(crh_sweep_run("/nonexistent/spec", nullptr, "x.csv") == CRH_EIO);

    Scenario s;
    REQUIRE(crh_scenario_default(&s.ptr) == CRH_OK);
    REQUIRE(crh_scenario_set(s.ptr, "n_subcarriers", "2") == CRH_OK);
    char* report = nullptr;
    int failures = -1;
    REQUIRE(crh_verify_suite(s.ptr, 1, 2, 1e-6, &report, &failures) == CRH_OK);
    const std::string text(report);
    crh_string_free(report);
    CHECK(failures == 0);
    CHECK(text.find("result=PASS") != std::string::npos);

    std::remove(spec_path);
    std::remove("capi_sweep_a.csv");
    std::remove("capi_sweep_b.csv");
}
