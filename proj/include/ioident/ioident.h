/*
 * C API for the ioident library: simulation of parameterized input/output
 * ODE systems under structured probe signals, linear-systems analysis, and
 * parameter identifiability machinery.
 *
 * Conventions:
 *   - Every fallible function returns an ioid_status; out-parameters are
 *     written only on IOID_OK.
 *   - ioid_last_error() describes the most recent failure on the calling
 *     thread.
 *   - Objects are opaque handles released with their ioid_*_free function.
 *   - Strings returned through char** are heap-allocated; release them with
 *     ioid_string_free.
 *   - Parameter bindings are passed as parallel name/value arrays and act as
 *     overrides on top of the model's defaults.
 */
#ifndef IOIDENT_H
#define IOIDENT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ioid_status {
    IOID_OK = 0,
    IOID_ERR_INVALID = 1, /* bad arguments or violated preconditions */
    IOID_ERR_NUMERIC = 2, /* divergence, singularity, non-convergence */
    IOID_ERR_PARSE = 3    /* malformed expression, signal spec, file or CSV */
} ioid_status;

const char* ioid_version(void);
const char* ioid_last_error(void);
void ioid_string_free(char* s);

typedef struct ioid_model ioid_model;
typedef struct ioid_signal ioid_signal;
typedef struct ioid_trajectory ioid_trajectory;
typedef struct ioid_lti ioid_lti;
typedef struct ioid_sampled ioid_sampled;
typedef struct ioid_experiment ioid_experiment;
typedef struct ioid_ident_report ioid_ident_report;
typedef struct ioid_fit_result ioid_fit_result;
typedef struct ioid_posterior ioid_posterior;

/* ------------------------------------------------------------------ models */

ioid_status ioid_model_from_registry(const char* id, ioid_model** out);
ioid_status ioid_model_from_json(const char* json_text, ioid_model** out);
ioid_status ioid_model_from_file(const char* path, ioid_model** out);
void ioid_model_free(ioid_model* model);

int ioid_model_state_count(const ioid_model* model);
int ioid_model_param_count(const ioid_model* model);
const char* ioid_model_state_name(const ioid_model* model, int index);
const char* ioid_model_param_name(const ioid_model* model, int index);
/* 1 if the parameter has a default (stored in *value when non-NULL), else 0. */
int ioid_model_param_default(const ioid_model* model, const char* name, double* value);

/* ----------------------------------------------------------------- signals */

/* Spec strings: zero | step:<u0> | pulse:<u0>,<t_on>,<t_off> | ramp:<slope>
 * | impulse:<area>,<width> | pwl:<t0>,<v0>;<t1>,<v1>;... */
ioid_status ioid_signal_parse(const char* spec, ioid_signal** out);
void ioid_signal_free(ioid_signal* s);
ioid_status ioid_signal_eval(const ioid_signal* s, double t, double* out);

/* -------------------------------------------------------------- simulation */

ioid_status ioid_simulate(const ioid_model* model, const char* const* names,
                          const double* values, int n_overrides, const ioid_signal* s, double t0,
                          double t1, double h, ioid_trajectory** out);
void ioid_trajectory_free(ioid_trajectory* traj);
size_t ioid_trajectory_size(const ioid_trajectory* traj);
ioid_status ioid_trajectory_point(const ioid_trajectory* traj, size_t index, double* t, double* u,
                                  double* y);
/* CSV body `t,u,y,x_<name>...`; path "-" writes to stdout. */
ioid_status ioid_trajectory_write_csv(const ioid_trajectory* traj, const char* path);
/* Output series as a sampled function; fails unless the grid is uniform. */
ioid_status ioid_trajectory_outputs(const ioid_trajectory* traj, ioid_sampled** out);

/* ------------------------------------------------------------ LTI analysis */

/* A is n*n row-major. */
ioid_status ioid_lti_create(int n, const double* A, const double* b, const double* c,
                            ioid_lti** out);
void ioid_lti_free(ioid_lti* sys);
ioid_status ioid_lti_impulse(const ioid_lti* sys, double t, double* out);
ioid_status ioid_lti_step(const ioid_lti* sys, double t, double* out);
ioid_status ioid_lti_impulse_series(const ioid_lti* sys, double t1, double h, ioid_sampled** out);
ioid_status ioid_lti_step_series(const ioid_lti* sys, double t1, double h, ioid_sampled** out);
ioid_status ioid_lti_gain(const ioid_lti* sys, double* out);
ioid_status ioid_lti_is_hurwitz(const ioid_lti* sys, int* out);
/* out must hold m values. */
ioid_status ioid_lti_markov(const ioid_lti* sys, int m, double* out);
ioid_status ioid_lti_minimality(const ioid_lti* sys, double tol, int* reach_rank, int* obs_rank,
                                int* minimal);
ioid_status ioid_lti_equivalent(const ioid_lti* s1, const ioid_lti* s2, double tol,
                                int* equivalent);
/* T must hold n*n values (row-major). */
ioid_status ioid_lti_similarity(const ioid_lti* s1, const ioid_lti* s2, double tol, double* T);
ioid_status ioid_lti_frequency_response(const ioid_lti* sys, double sigma_re, double sigma_im,
                                        double* out_re, double* out_im);
/* (a, b, c) -> (a, T b, c / T). out holds 3 values. */
ioid_status ioid_symmetry_orbit(double a, double b, double c, double T, double* out);

/* -------------------------------------------------------- sampled functions */

ioid_status ioid_sampled_create(double h, double t0, const double* values, size_t n,
                                ioid_sampled** out);
void ioid_sampled_free(ioid_sampled* f);
size_t ioid_sampled_size(const ioid_sampled* f);
double ioid_sampled_step(const ioid_sampled* f);
double ioid_sampled_start(const ioid_sampled* f);
/* out must hold ioid_sampled_size values. */
ioid_status ioid_sampled_values(const ioid_sampled* f, double* out);
/* CSV `t,value`; path "-" writes to stdout. Loading enforces a uniform grid. */
ioid_status ioid_sampled_write_csv(const ioid_sampled* f, const char* path);
ioid_status ioid_sampled_read_csv(const char* path, ioid_sampled** out);

ioid_status ioid_convolve(const ioid_sampled* k, const ioid_sampled* u, ioid_sampled** out);
/* ridge < 0 requests the default data-scaled regularization. */
ioid_status ioid_deconvolve_impulse(const ioid_sampled* y, const ioid_sampled* u, double ridge,
                                    ioid_sampled** out);

/* ------------------------------------------- derivative-based estimators */

/* side: 0 = left, 1 = right, 2 = central. window <= 0 picks the default
 * window/degree for the order (degree is then ignored). */
ioid_status ioid_fit_derivative(const ioid_sampled* f, double t0, int order, int side,
                                double window, int degree, double* out);
ioid_status ioid_estimate_a_from_step(const ioid_sampled* K, double* out);
ioid_status ioid_estimate_lambda_from_ramp(const ioid_sampled* y, double* out);
ioid_status ioid_estimate_lambda_from_pulse(const ioid_sampled* y, double t_off, double* out);
/* Interval division b = K'(0)/c; the divisor interval must exclude zero. */
ioid_status ioid_gray_box_interval(double num_lo, double num_hi, double den_lo, double den_hi,
                                   double* out_lo, double* out_hi);

/* --------------------------------------------------------- identifiability */

/* Sensitivity Gram matrix, rank, null directions and Cramer-Rao bounds for
 * the free parameters (n_free = 0 selects all declared parameters).
 * sigma_noise <= 0 skips the Cramer-Rao section; gram_tol <= 0 applies the
 * default relative rank threshold 1e-6. */
ioid_status ioid_identify(const ioid_model* model, const char* const* names, const double* values,
                          int n_overrides, const char* const* free_names, int n_free,
                          const ioid_signal* s, double t0, double t1, double h,
                          double sigma_noise, double gram_tol, ioid_ident_report** out);
void ioid_ident_report_free(ioid_ident_report* report);
int ioid_ident_report_param_count(const ioid_ident_report* report);
int ioid_ident_report_rank(const ioid_ident_report* report);
/* out must hold param_count values; unidentifiable parameters report HUGE_VAL. */
ioid_status ioid_ident_report_crb(const ioid_ident_report* report, double* out);
ioid_status ioid_ident_report_text(const ioid_ident_report* report, char** out);

/* ------------------------------------------------- experiments and fitting */

ioid_status ioid_experiment_create(const ioid_signal* s, const double* times, const double* obs,
                                   size_t n, double sigma, ioid_experiment** out);
/* Reads `t,observation` CSV. */
ioid_status ioid_experiment_read_csv(const char* path, const ioid_signal* s, double sigma,
                                     ioid_experiment** out);
ioid_status ioid_experiment_write_csv(const ioid_experiment* e, const char* path);
void ioid_experiment_free(ioid_experiment* e);

/* Simulated data with seeded Gaussian noise (sigma = 0 gives exact samples). */
ioid_status ioid_synthesize(const ioid_model* model, const char* const* names,
                            const double* values, int n_overrides, const ioid_signal* s,
                            const double* times, size_t n_times, double sigma, uint64_t seed,
                            double h, ioid_experiment** out);

/* Damped Gauss-Newton fit of the parameters named in init_names (initial
 * values init_values), everything else coming from the overrides/defaults.
 * lo/hi are optional per-free-parameter box bounds (NULL = unbounded). */
ioid_status ioid_fit(const ioid_model* model, const char* const* names, const double* values,
                     int n_overrides, const ioid_experiment* const* experiments,
                     int n_experiments, const char* const* init_names, const double* init_values,
                     int n_init, const double* lo, const double* hi, double h,
                     ioid_fit_result** out);
void ioid_fit_result_free(ioid_fit_result* fit);
int ioid_fit_result_converged(const ioid_fit_result* fit);
ioid_status ioid_fit_result_value(const ioid_fit_result* fit, const char* name, double* out);
ioid_status ioid_fit_result_text(const ioid_fit_result* fit, char** out);

/* ------------------------------------------------------ Bayesian posterior */

/* Uniform prior over a box: cells[i] grid points on [lo[i], hi[i]]. */
ioid_status ioid_posterior_uniform(const char* const* names, const double* lo, const double* hi,
                                   const int* cells, int n_params, ioid_posterior** out);
void ioid_posterior_free(ioid_posterior* grid);
/* Replaces the grid contents with the updated posterior. */
ioid_status ioid_bayes_update(ioid_posterior* grid, const ioid_model* model,
                              const char* const* names, const double* values, int n_overrides,
                              const ioid_experiment* e, double h);
size_t ioid_posterior_cell_count(const ioid_posterior* grid);
/* out must hold n_params values. */
ioid_status ioid_posterior_mode(const ioid_posterior* grid, double* out);
/* CSV `<param>,...,probability`; path "-" writes to stdout. */
ioid_status ioid_posterior_write_csv(const ioid_posterior* grid, const char* path);

/* -------------------------------------------------------------------- demo */

/* Runs the verification battery; *report gets the PASS/FAIL table. */
ioid_status ioid_demo_run(char** report, int* n_checks, int* n_failed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IOIDENT_H */
