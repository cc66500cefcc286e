#include "cranhet.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <string>

#include "core/equilibrium.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/rng.hpp"
#include "core/scenario.hpp"

using namespace cranhet;

namespace {

thread_local std::string g_last_error;

crh_status fail(crh_status st, const std::string& msg) {
    g_last_error = msg;
    return st;
}

// Maps core exceptions onto status codes.
template <typename Fn>
crh_status guarded(Fn&& fn) {
    try {
        fn();
        return CRH_OK;
    } catch (const ParseError& e) {
        return fail(CRH_EPARSE, e.what());
    } catch (const IoError& e) {
        return fail(CRH_EIO, e.what());
    } catch (const InvalidArgError& e) {
        return fail(CRH_EINVAL, e.what());
    } catch (const SolverError& e) {
        return fail(CRH_ENOCONV, e.what());
    } catch (const std::exception& e) {
        return fail(CRH_EINTERNAL, e.what());
    } catch (...) {
        return fail(CRH_EINTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

// Opaque handle bodies. The result retains everything needed to re-verify and
// dump without re-solving.
struct crh_scenario {
    Scenario s;
};

struct crh_result {
    Scenario s;
    Deployment d;
    ChannelRealization c;
    EquilibriumOptions opts;
    EquilibriumResult r;
    LevelStrategyTable table; // populated for CHE only
    bool has_table = false;
};

extern "C" {

const char* crh_version(void) { return "1.0.0"; }

const char* crh_status_name(crh_status st) {
    switch (st) {
        case CRH_OK: return "ok";
        case CRH_EINVAL: return "invalid argument";
        case CRH_EPARSE: return "parse error";
        case CRH_EIO: return "io error";
        case CRH_ENOCONV: return "solver did not converge";
        case CRH_EINTERNAL: return "internal error";
    }
    return "?";
}

const char* crh_last_error(void) { return g_last_error.c_str(); }

crh_status crh_scenario_default(crh_scenario** out) {
    if (!out) return fail(CRH_EINVAL, "crh_scenario_default: out is NULL");
    return guarded([&] { *out = new crh_scenario{desk_scenario()}; });
}

crh_status crh_scenario_load(const char* path, crh_scenario** out) {
    if (!path || !out) return fail(CRH_EINVAL, "crh_scenario_load: NULL argument");
    return guarded([&] { *out = new crh_scenario{load_scenario(path)}; });
}

crh_status crh_scenario_set(crh_scenario* s, const char* key, const char* value) {
    if (!s || !key || !value) return fail(CRH_EINVAL, "crh_scenario_set: NULL argument");
    return guarded([&] { scenario_set(s->s, key, value); });
}

crh_status crh_scenario_get(const crh_scenario* s, const char* key, double* out) {
    if (!s || !key || !out) return fail(CRH_EINVAL, "crh_scenario_get: NULL argument");
    return guarded([&] {
        const Scenario& sc = s->s;
        const std::string k = key;
        if (k == "n_rrh") *out = sc.n_rrh;
        else if (k == "n_cran_users") *out = sc.n_cran_users;
        else if (k == "n_macro") *out = sc.n_macro;
        else if (k == "n_pico") *out = sc.n_pico;
        else if (k == "n_femto") *out = sc.n_femto;
        else if (k == "users_per_macro") *out = sc.users_per_macro;
        else if (k == "users_per_pico") *out = sc.users_per_pico;
        else if (k == "users_per_femto") *out = sc.users_per_femto;
        else if (k == "n_subcarriers") *out = sc.n_subcarriers;
        else if (k == "bandwidth_hz") *out = sc.bandwidth_hz;
        else if (k == "noise_power_w") *out = sc.noise_power_w;
        else if (k == "pathloss_exponent") *out = sc.pathloss_exponent;
        else if (k == "p_max_rrh_w") *out = sc.p_max_rrh_w;
        else if (k == "p_max_macro_w") *out = sc.p_max_macro_w;
        else if (k == "p_max_pico_w") *out = sc.p_max_pico_w;
        else if (k == "p_max_femto_w") *out = sc.p_max_femto_w;
        else if (k == "grid_side_m") *out = sc.grid_side_m;
        else if (k == "radius_macro_m") *out = sc.radius_macro_m;
        else if (k == "radius_pico_m") *out = sc.radius_pico_m;
        else if (k == "radius_femto_m") *out = sc.radius_femto_m;
        else if (k == "rayleigh_mean_power") *out = sc.rayleigh_mean_power;
        else if (k == "ch_tau") *out = sc.ch_tau;
        else if (k == "ch_top_level") *out = sc.ch_top_level;
        else throw InvalidArgError("unknown scenario key '" + k + "'");
    });
}

void crh_scenario_free(crh_scenario* s) { delete s; }

void crh_solve_opts_init(crh_solve_opts* opts) {
    if (!opts) return;
    opts->tau_override = 0.0;
    opts->tol_outer_rel = 0.0;
    opts->max_sweeps = 0;
}

crh_status crh_solve(const crh_scenario* s, uint64_t seed, crh_concept concept_id,
                     const crh_solve_opts* opts, crh_result** out) {
    if (!s || !out) return fail(CRH_EINVAL, "crh_solve: NULL argument");
    return guarded([&] {
        auto handle = std::make_unique<crh_result>();
        handle->s = s->s;
        if (opts) {
            if (opts->tau_override > 0) handle->s.ch_tau = opts->tau_override;
            if (opts->tol_outer_rel > 0) handle->opts.tol_outer_rel = opts->tol_outer_rel;
            if (opts->max_sweeps > 0) handle->opts.max_sweeps = opts->max_sweeps;
        }
        handle->s.validate();
        handle->d = sample_deployment(handle->s, derive_seed(seed, 0, 0, 0));
        handle->c = sample_channels(handle->d, handle->s, derive_seed(seed, 0, 0, 1));
        switch (concept_id) {
            case CRH_CONCEPT_EQUAL:
                handle->r = solve_equal_power(handle->s, handle->d, handle->c);
                break;
            case CRH_CONCEPT_NE:
                handle->r = solve_ne(handle->s, handle->d, handle->c, handle->opts);
                break;
            case CRH_CONCEPT_CHE: {
                auto che = solve_che(handle->s, handle->d, handle->c, handle->opts);
                handle->r = std::move(che.result);
                handle->table = std::move(che.table);
                handle->has_table = true;
                break;
            }
            default:
                throw InvalidArgError("crh_solve: unknown concept");
        }
        *out = handle.release();
    });
}

int crh_result_converged(const crh_result* r) { return r && r->r.converged ? 1 : 0; }

int32_t crh_result_iterations(const crh_result* r) { return r ? r->r.iterations : 0; }

double crh_result_max_residual(const crh_result* r) {
    return r ? r->r.max_residual : std::numeric_limits<double>::quiet_NaN();
}

double crh_result_kind_rate(const crh_result* r, crh_kind kind) {
    if (!r || kind < CRH_KIND_CRAN || kind > CRH_KIND_TOTAL)
        return std::numeric_limits<double>::quiet_NaN();
    return r->r.kind_rate(static_cast<RateKind>(kind));
}

crh_status crh_result_verify(const crh_result* r, double* max_rel_improvement) {
    if (!r || !max_rel_improvement) return fail(CRH_EINVAL, "crh_result_verify: NULL argument");
    return guarded([&] {
        if (r->r.scheme == Concept::Che)
            *max_rel_improvement = verify_che(r->r, r->table, r->s, r->d, r->c, r->opts);
        else
            *max_rel_improvement = verify_ne(r->r, r->s, r->d, r->c, r->opts);
    });
}

crh_status crh_result_to_json(const crh_result* r, char** out) {
    if (!r || !out) return fail(CRH_EINVAL, "crh_result_to_json: NULL argument");
    return guarded([&] {
        std::string s = result_to_json(r->r, r->d);
        if (r->has_table) {
            s.pop_back(); // strip the closing brace and splice the table in
            while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
            s += ",\n  \"level_table\": " + table_to_json(r->table, r->d) + "\n}";
        }
        *out = dup_string(s);
    });
}

void crh_result_free(crh_result* r) { delete r; }

crh_status crh_sweep_run(const char* spec_path, const char* base_scenario_path,
                         const char* csv_path) {
    if (!spec_path || !csv_path) return fail(CRH_EINVAL, "crh_sweep_run: NULL argument");
    return guarded([&] {
        const Scenario base =
            base_scenario_path ? load_scenario(base_scenario_path) : desk_scenario();
        const SweepSpec spec = load_sweep_spec(spec_path, base);
        emit_csv_file(run_sweep(spec), csv_path);
    });
}

crh_status crh_verify_suite(const crh_scenario* s, uint64_t base_seed, int n_seeds, double tol,
                            char** report_out, int* failures_out) {
    if (!s || !report_out || !failures_out)
        return fail(CRH_EINVAL, "crh_verify_suite: NULL argument");
    return guarded([&] {
        const auto report = run_verify(s->s, base_seed, n_seeds, tol);
        *report_out = dup_string(report.text());
        *failures_out = report.pass() ? 0 : 1;
        int fails = 0;
        for (const auto& line : report.lines) {
            if (line.ne_converged && line.ne_improvement > tol) ++fails;
            if (line.che_improvement > tol) ++fails;
        }
        if (fails > 0) *failures_out = fails;
    });
}

void crh_string_free(char* s) { delete[] s; }

} // extern "C"
