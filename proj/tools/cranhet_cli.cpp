// cranhet command line: solve one instance, run a Monte Carlo sweep, or run
// the equilibrium-certificate suite. Talks to the engine exclusively through
// the C API in cranhet.h.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "cranhet.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNoConvergence = 2;

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

int report_failure(crh_status st) {
    std::fprintf(stderr, "error: %s: %s\n", crh_status_name(st), crh_last_error());
    return st == CRH_ENOCONV ? kExitNoConvergence : kExitInvalid;
}

struct ScenarioHandle {
    crh_scenario* ptr = nullptr;
    ~ScenarioHandle() { crh_scenario_free(ptr); }
};

crh_status make_scenario(const std::string& path, double tau, ScenarioHandle& out) {
    crh_status st =
        path.empty() ? crh_scenario_default(&out.ptr) : crh_scenario_load(path.c_str(), &out.ptr);
    if (st != CRH_OK) return st;
    if (tau > 0) st = crh_scenario_set(out.ptr, "ch_tau", shortest(tau).c_str());
    return st;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Power-allocation game solver for a CRAN coexisting with a HetNet"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::uint64_t seed = 1;
    std::string concept_name = "ne";
    std::string out_path;
    int realizations = 10;
    double tol = 1e-6;
    double tau = 0.0;
    bool strict = false;
    bool json = false;
    std::string spec_path;

    auto* solve = app.add_subcommand("solve", "solve one scenario+seed and print per-type rates");
    solve->add_option("--scenario", scenario_path, "scenario file (default: desk scale)");
    solve->add_option("--seed", seed, "realization seed");
    solve->add_option("--concept", concept_name, "ne|che|equal")
        ->check(CLI::IsMember({"ne", "che", "equal"}));
    solve->add_option("--tol", tol, "NE sweep tolerance (relative)");
    solve->add_option("--tau", tau, "override the Poisson level rate");
    solve->add_flag("--strict", strict, "exit 2 when the NE dynamics did not converge");
    solve->add_flag("--json", json, "dump the full result as JSON");

    auto* sweep = app.add_subcommand("sweep", "run a sweep spec file and write CSV");
    sweep->add_option("spec", spec_path, "sweep spec file")->required();
    sweep->add_option("--scenario", scenario_path, "base scenario file for the sweep");
    sweep->add_option("--out", out_path, "output CSV path")->required();

    auto* verify = app.add_subcommand("verify", "run the NE/CHE certificate suites");
    verify->add_option("--scenario", scenario_path, "scenario file (default: desk scale)");
    verify->add_option("--seed", seed, "base seed");
    verify->add_option("--realizations", realizations, "number of seeds");
    verify->add_option("--tol", tol, "certificate tolerance");
    verify->add_option("--tau", tau, "override the Poisson level rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    if (solve->parsed()) {
        ScenarioHandle sc;
        crh_status st = make_scenario(scenario_path, tau, sc);
        if (st != CRH_OK) return report_failure(st);

        crh_solve_opts opts;
        crh_solve_opts_init(&opts);
        opts.tol_outer_rel = tol;

        const crh_concept concept_id = concept_name == "ne"    ? CRH_CONCEPT_NE
                                      : concept_name == "che" ? CRH_CONCEPT_CHE
                                                              : CRH_CONCEPT_EQUAL;
        crh_result* result = nullptr;
        st = crh_solve(sc.ptr, seed, concept_id, &opts, &result);
        if (st != CRH_OK) return report_failure(st);

        if (json) {
            char* text = nullptr;
            st = crh_result_to_json(result, &text);
            if (st != CRH_OK) {
                crh_result_free(result);
                return report_failure(st);
            }
            std::printf("%s\n", text);
            crh_string_free(text);
        } else {
            std::printf("concept=%s seed=%llu converged=%d iterations=%d residual=%s\n",
                        concept_name.c_str(), static_cast<unsigned long long>(seed),
                        crh_result_converged(result), crh_result_iterations(result),
                        shortest(crh_result_max_residual(result)).c_str());
            const struct { crh_kind kind; const char* name; } kinds[] = {
                {CRH_KIND_CRAN, "CRAN"},   {CRH_KIND_MACRO, "Macro"}, {CRH_KIND_PICO, "Pico"},
                {CRH_KIND_FEMTO, "Femto"}, {CRH_KIND_TOTAL, "Total"},
            };
            for (const auto& k : kinds) {
                const double rate = crh_result_kind_rate(result, k.kind);
                if (rate == rate) // skip absent kinds
                    std::printf("%-5s %s\n", k.name, shortest(rate).c_str());
            }
        }
        const bool converged = crh_result_converged(result) != 0;
        crh_result_free(result);
        if (strict && !converged) return kExitNoConvergence;
        return kExitOk;
    }

    if (sweep->parsed()) {
        const char* base = scenario_path.empty() ? nullptr : scenario_path.c_str();
        const crh_status st = crh_sweep_run(spec_path.c_str(), base, out_path.c_str());
        if (st != CRH_OK) return report_failure(st);
        return kExitOk;
    }

    // verify
    ScenarioHandle sc;
    crh_status st = make_scenario(scenario_path, tau, sc);
    if (st != CRH_OK) return report_failure(st);
    char* report = nullptr;
    int failures = 0;
    st = crh_verify_suite(sc.ptr, seed, realizations, tol, &report, &failures);
    if (st != CRH_OK) return report_failure(st);
    std::printf("%s", report);
    crh_string_free(report);
    return failures == 0 ? kExitOk : kExitInvalid;
}
