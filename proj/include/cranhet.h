/* cranhet - downlink power-allocation game engine for hybrid CRAN / small-cell
 * networks. C API over the C++ core: opaque handles, status codes, and a
 * thread-local last-error message. All functions returning crh_status set the
 * last-error message on failure. */

#ifndef CRANHET_H
#define CRANHET_H

#include <stdint.h>

#if defined(_WIN32)
#define CRH_API __declspec(dllexport)
#else
#define CRH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum crh_status {
    CRH_OK = 0,
    CRH_EINVAL = 1,   /* invalid argument or scenario invariant violation */
    CRH_EPARSE = 2,   /* malformed config / spec / CSV content */
    CRH_EIO = 3,      /* filesystem failure */
    CRH_ENOCONV = 4,  /* an inner solver did not converge */
    CRH_EINTERNAL = 5 /* unexpected failure */
} crh_status;

typedef enum crh_concept {
    CRH_CONCEPT_NE = 0,   /* Nash equilibrium via best-response dynamics */
    CRH_CONCEPT_CHE = 1,  /* cognitive hierarchy equilibrium */
    CRH_CONCEPT_EQUAL = 2 /* equal power baseline */
} crh_concept;

typedef enum crh_kind {
    CRH_KIND_CRAN = 0,
    CRH_KIND_MACRO = 1,
    CRH_KIND_PICO = 2,
    CRH_KIND_FEMTO = 3,
    CRH_KIND_TOTAL = 4
} crh_kind;

typedef struct crh_scenario crh_scenario;
typedef struct crh_result crh_result;

CRH_API const char* crh_version(void);
CRH_API const char* crh_status_name(crh_status st);

/* Message for the most recent failing call on this thread ("" if none). */
CRH_API const char* crh_last_error(void);

/* ---- scenario ---------------------------------------------------------- */

/* Desk-scale default configuration. */
CRH_API crh_status crh_scenario_default(crh_scenario** out);

/* Load a `key = value` scenario file; power fields accept dbm/w suffixes. */
CRH_API crh_status crh_scenario_load(const char* path, crh_scenario** out);

/* Apply one key/value assignment (same syntax as a file line). */
CRH_API crh_status crh_scenario_set(crh_scenario* s, const char* key, const char* value);

/* Numeric value of a scenario field. */
CRH_API crh_status crh_scenario_get(const crh_scenario* s, const char* key, double* out);

CRH_API void crh_scenario_free(crh_scenario* s);

/* ---- solving ----------------------------------------------------------- */

typedef struct crh_solve_opts {
    double tau_override;  /* > 0 overrides the scenario's ch_tau */
    double tol_outer_rel; /* > 0 overrides the NE sweep tolerance (default 1e-6) */
    int max_sweeps;       /* > 0 overrides the NE sweep cap (default 200) */
} crh_solve_opts;

CRH_API void crh_solve_opts_init(crh_solve_opts* opts);

/* Samples deployment and channels for (scenario, seed), solves the requested
 * concept and evaluates realized rates. NE non-convergence is not an error;
 * inspect crh_result_converged. */
CRH_API crh_status crh_solve(const crh_scenario* s, uint64_t seed, crh_concept concept_id,
                             const crh_solve_opts* opts, crh_result** out);

CRH_API int crh_result_converged(const crh_result* r);
CRH_API int32_t crh_result_iterations(const crh_result* r);
CRH_API double crh_result_max_residual(const crh_result* r);

/* Mean realized rate of a player kind in bits/s (TOTAL = system sum).
 * Returns NaN when the deployment has no players of that kind. */
CRH_API double crh_result_kind_rate(const crh_result* r, crh_kind kind);

/* Max relative unilateral improvement against the result's own solution
 * concept (exact best responses for NE/equal-power, level-specific cognitive
 * hierarchy utilities for CHE). ~0 certifies the equilibrium. */
CRH_API crh_status crh_result_verify(const crh_result* r, double* max_rel_improvement);

/* Structured JSON dump of the result (and the level table for CHE).
 * Free with crh_string_free. */
CRH_API crh_status crh_result_to_json(const crh_result* r, char** out);

CRH_API void crh_result_free(crh_result* r);

/* ---- experiments ------------------------------------------------------- */

/* Run a sweep spec file and write the aggregate CSV
 * (header: variable,value,concept,kind,mean_rate_bps,std_rate_bps,n).
 * base_scenario_path may be NULL for the desk-scale default. */
CRH_API crh_status crh_sweep_run(const char* spec_path, const char* base_scenario_path,
                                 const char* csv_path);

/* Equilibrium certificates over n_seeds consecutive seeds. Writes a
 * human-readable report (free with crh_string_free) and the number of
 * tolerance failures; *failures == 0 means the suite passed. */
CRH_API crh_status crh_verify_suite(const crh_scenario* s, uint64_t base_seed, int n_seeds,
                                    double tol, char** report_out, int* failures_out);

CRH_API void crh_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* CRANHET_H */
