/* ncdist.h -- C interface to the free-probability spectral-distribution
 * library.  All state lives behind opaque handles; every call returns a
 * status code and the last error message is kept per thread.
 */

#ifndef NCDIST_H
#define NCDIST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define NCDIST_API __declspec(dllexport)
#else
#define NCDIST_API __attribute__((visibility("default")))
#endif

typedef struct ncdist_job ncdist_job;
typedef struct ncdist_report ncdist_report;

typedef enum {
  NCDIST_OK = 0,
  NCDIST_ERR_CONFIG = 2,       /* bad expression, specs, grid, caps */
  NCDIST_ERR_CONVERGENCE = 3,  /* a solver failed to converge */
  NCDIST_ERR_SINGULAR = 4,     /* rational expression not defined at the input */
  NCDIST_ERR_INTERNAL = 5
} ncdist_status;

NCDIST_API const char* ncdist_last_error(void);

/* -- job configuration ---------------------------------------------------- */

NCDIST_API ncdist_job* ncdist_job_create(void);
NCDIST_API void ncdist_job_destroy(ncdist_job* job);

NCDIST_API ncdist_status ncdist_job_set_expression(ncdist_job* job, const char* expression);
/* {"x1": {"kind":"atomic","atoms":[[0.5,-2],[0.25,-1],[0.25,1]]},
    "x2": {"kind":"semicircular","variance":1.0}} */
NCDIST_API ncdist_status ncdist_job_load_variables_json(ncdist_job* job, const char* json_text);
NCDIST_API ncdist_status ncdist_job_set_variable_atomic(ncdist_job* job, int index,
                                                        const double* weights,
                                                        const double* positions, int count);
NCDIST_API ncdist_status ncdist_job_set_variable_semicircular(ncdist_job* job, int index,
                                                              double variance);
NCDIST_API ncdist_status ncdist_job_set_num_vars(ncdist_job* job, int num_vars);
NCDIST_API ncdist_status ncdist_job_set_grid(ncdist_job* job, double lo, double hi, int points);
NCDIST_API ncdist_status ncdist_job_set_eps(ncdist_job* job, double eps_z, double eps_pencil);
NCDIST_API ncdist_status ncdist_job_set_workers(ncdist_job* job, int workers);
NCDIST_API ncdist_status ncdist_job_set_oracle_check(ncdist_job* job, int enabled);
NCDIST_API ncdist_status ncdist_job_set_rmt(ncdist_job* job, uint64_t n, int trials,
                                            uint64_t seed);

/* round-trip serialization of the whole configuration */
NCDIST_API ncdist_status ncdist_job_to_json(const ncdist_job* job, char* buffer, size_t size,
                                            size_t* needed);
NCDIST_API ncdist_status ncdist_job_from_json(ncdist_job* job, const char* json_text);

/* -- runs ------------------------------------------------------------------ */

NCDIST_API ncdist_status ncdist_run_density(ncdist_job* job, ncdist_report** report);
NCDIST_API ncdist_status ncdist_run_validate(ncdist_job* job, ncdist_report** report);
NCDIST_API ncdist_status ncdist_run_moments(ncdist_job* job, const char* word,
                                            ncdist_report** report);

/* -- report accessors ------------------------------------------------------ */

NCDIST_API void ncdist_report_destroy(ncdist_report* report);

NCDIST_API size_t ncdist_report_grid_size(const ncdist_report* report);
/* any output pointer may be NULL; status_out: 1 converged, 0 failed */
NCDIST_API ncdist_status ncdist_report_density_point(const ncdist_report* report, size_t index,
                                                     double* t, double* rho, int* status_out,
                                                     long* iterations, double* residual);
NCDIST_API double ncdist_report_mass(const ncdist_report* report);
NCDIST_API double ncdist_report_ks(const ncdist_report* report);
NCDIST_API int ncdist_report_failed_points(const ncdist_report* report);
NCDIST_API int ncdist_report_aborted_trials(const ncdist_report* report);
NCDIST_API int ncdist_report_converged(const ncdist_report* report);
NCDIST_API void ncdist_report_solver_stats(const ncdist_report* report, long* iterations,
                                           long* solves, long* warm_hits, double* max_residual);
/* oracle-check result; returns NCDIST_ERR_CONFIG if no check ran */
NCDIST_API ncdist_status ncdist_report_oracle_error(const ncdist_report* report,
                                                    double* max_rel_error);
/* moments mode: solver_available is 0 when only the oracle value exists */
NCDIST_API ncdist_status ncdist_report_moment(const ncdist_report* report, double* oracle_re,
                                              double* oracle_im, int* solver_available,
                                              double* solver_re, double* solver_im);

NCDIST_API ncdist_status ncdist_report_write_density_csv(const ncdist_report* report,
                                                         const char* path);
NCDIST_API ncdist_status ncdist_report_write_histogram_csv(const ncdist_report* report,
                                                           const char* path);

#ifdef __cplusplus
}
#endif

#endif /* NCDIST_H */
