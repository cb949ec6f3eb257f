/* C interface to the sparse superposition code library.
 *
 * All functions that can fail return a sparc_status; on failure the output
 * parameters are untouched and sparc_last_error() describes what went wrong
 * (per thread). Handles are created by *_create / *_run functions and must
 * be released with the matching *_free; freeing NULL is a no-op.
 */
#ifndef SPARC_H
#define SPARC_H

#include <stddef.h>
#include <stdint.h>

#ifndef SPARC_API
#define SPARC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sparc_status {
    SPARC_OK = 0,
    SPARC_ERR_INVALID_ARGUMENT = 1,
    SPARC_ERR_PRECONDITION = 2, /* a declared mathematical precondition failed */
    SPARC_ERR_NONCONVERGENCE = 3,
    SPARC_ERR_MEMORY = 4,
    SPARC_ERR_NUMERIC = 5,
    SPARC_ERR_INTERNAL = 6
} sparc_status;

SPARC_API const char* sparc_version(void);
SPARC_API const char* sparc_strerror(sparc_status status);
/* Message from the most recent failing call on this thread ("" if none). */
SPARC_API const char* sparc_last_error(void);

/* ---- code: parameters plus power allocation ------------------------------ */

typedef struct sparc_code sparc_code;

/* Derives the block length n from L log M = n R (R in nats, rounded so the
 * realized rate does not exceed the request). The power allocation is the
 * capacity-matched exponential one, or flat when sigma2 == 0. */
SPARC_API sparc_status sparc_code_create(uint32_t L, uint32_t M, double R_nats, double P,
                                         double sigma2, sparc_code** out);
/* Same, but with an explicit block length; R becomes L log(M)/n. */
SPARC_API sparc_status sparc_code_create_n(uint32_t L, uint32_t M, uint64_t n, double P,
                                           double sigma2, sparc_code** out);
SPARC_API void sparc_code_free(sparc_code* code);

SPARC_API uint32_t sparc_code_L(const sparc_code* code);
SPARC_API uint32_t sparc_code_M(const sparc_code* code);
SPARC_API uint64_t sparc_code_n(const sparc_code* code);
SPARC_API double sparc_code_rate(const sparc_code* code);     /* nats */
SPARC_API double sparc_code_P(const sparc_code* code);
SPARC_API double sparc_code_sigma2(const sparc_code* code);
SPARC_API double sparc_code_snr(const sparc_code* code);
SPARC_API double sparc_code_capacity(const sparc_code* code); /* nats */
SPARC_API double sparc_code_delta_r(const sparc_code* code);
/* Copies the L per-section powers into out (len must be >= L). */
SPARC_API sparc_status sparc_code_power(const sparc_code* code, double* out, uint64_t len);

/* ---- state evolution ----------------------------------------------------- */

typedef struct sparc_se_trace sparc_se_trace;

/* Runs the recursion with mc_samples Monte Carlo samples per expectation.
 * max_iter 0 and kappa2 <= 0 select the defaults (400, 1). A trace is
 * returned even when the admissibility condition fails (f_R >= 1); check
 * sparc_se_trace_eq18_ok. */
SPARC_API sparc_status sparc_se_run(const sparc_code* code, uint64_t mc_samples,
                                    uint64_t mc_seed, uint32_t max_iter, double kappa2,
                                    sparc_se_trace** out);
SPARC_API void sparc_se_trace_free(sparc_se_trace* trace);

SPARC_API uint32_t sparc_se_trace_T(const sparc_se_trace* trace);
SPARC_API uint32_t sparc_se_trace_len(const sparc_se_trace* trace); /* T + 1 rows */
SPARC_API double sparc_se_trace_f_r(const sparc_se_trace* trace);
SPARC_API double sparc_se_trace_delta_r(const sparc_se_trace* trace);
SPARC_API int sparc_se_trace_eq18_ok(const sparc_se_trace* trace);
SPARC_API int sparc_se_trace_stopped_on_floor(const sparc_se_trace* trace);
SPARC_API const char* sparc_se_trace_evaluator(const sparc_se_trace* trace);
/* name: one of "x", "tau2", "sigma2_t", "sigma_perp2", "tau_perp2";
 * copies T+1 values into out (len must be >= T+1). */
SPARC_API sparc_status sparc_se_trace_column(const sparc_se_trace* trace, const char* name,
                                             double* out, uint64_t len);

/* Monte Carlo estimate of the section error rate implied by the trace's
 * final effective noise level. */
SPARC_API sparc_status sparc_se_predicted_ser(const sparc_code* code,
                                              const sparc_se_trace* trace,
                                              uint64_t mc_samples, uint64_t mc_seed,
                                              double* value, double* std_err);

/* ---- simulation ---------------------------------------------------------- */

typedef struct sparc_sim_options {
    uint64_t master_seed;
    uint32_t num_trials;
    uint32_t parallelism;
    int fresh_matrix;       /* nonzero: new design matrix per trial */
    int implicit_matrix;    /* nonzero: fast implicit operator instead of dense */
    int tau_online;         /* nonzero: decoder tracks tau from residuals */
    uint32_t T_override;    /* 0: use the trace's T */
    uint64_t mem_cap_bytes; /* 0: default cap */
    const double* epsilons; /* thresholds for deviation fractions (may be NULL) */
    uint32_t num_epsilons;
} sparc_sim_options;

typedef struct sparc_sim_result sparc_sim_result;

SPARC_API sparc_status sparc_sim_run(const sparc_code* code, const sparc_se_trace* trace,
                                     const sparc_sim_options* options, sparc_sim_result** out);
SPARC_API void sparc_sim_result_free(sparc_sim_result* result);

SPARC_API uint32_t sparc_sim_num_trials(const sparc_sim_result* result);
SPARC_API uint64_t sparc_sim_num_failed(const sparc_sim_result* result);
SPARC_API double sparc_sim_mean_ser(const sparc_sim_result* result);
SPARC_API double sparc_sim_std_err_ser(const sparc_sim_result* result);
SPARC_API sparc_status sparc_sim_deviation_fraction(const sparc_sim_result* result,
                                                    uint32_t epsilon_index, double* out);
/* Per-trial scalars; any output pointer may be NULL. */
SPARC_API sparc_status sparc_sim_trial(const sparc_sim_result* result, uint32_t trial,
                                       uint64_t* seed, double* ser, int* decoded_ok,
                                       int* failed);
/* Number of recorded squared-error values for one trial (T + 1; 0 if the
 * trial failed), and the copy accessor. */
SPARC_API uint32_t sparc_sim_trial_mse_len(const sparc_sim_result* result, uint32_t trial);
SPARC_API sparc_status sparc_sim_trial_mse(const sparc_sim_result* result, uint32_t trial,
                                           double* out, uint64_t len);

/* ---- M sweep ------------------------------------------------------------- */

typedef struct sparc_sweep_options {
    uint32_t L;
    double R_nats;
    double P;
    double sigma2;
    const uint32_t* M_grid; /* strictly increasing powers of two */
    uint32_t grid_len;
    uint32_t num_trials;
    uint32_t parallelism;
    uint64_t master_seed;
    uint64_t mc_samples; /* state evolution sampling */
    uint64_t mc_seed;
    int fresh_matrix;
    int implicit_matrix;
    uint64_t mem_cap_bytes; /* 0: default cap */
} sparc_sweep_options;

typedef struct sparc_sweep_result sparc_sweep_result;

SPARC_API sparc_status sparc_sweep_run(const sparc_sweep_options* options,
                                       sparc_sweep_result** out);
SPARC_API void sparc_sweep_result_free(sparc_sweep_result* result);

SPARC_API uint32_t sparc_sweep_len(const sparc_sweep_result* result);
/* Any output pointer may be NULL. */
SPARC_API sparc_status sparc_sweep_point(const sparc_sweep_result* result, uint32_t index,
                                         uint32_t* M, uint64_t* n, uint32_t* T,
                                         uint32_t* num_trials, uint64_t* num_failed,
                                         double* mean_ser, double* std_err_ser,
                                         double* se_predicted_ser);

/* ---- finite-length bound calculators ------------------------------------- */

/* P(error rate > epsilon) bound; requires epsilon > (2 snr / C) f_r. Any
 * output pointer may be NULL. */
SPARC_API sparc_status sparc_theorem1_bound(const sparc_code* code, uint32_t T, double f_r,
                                            double epsilon, double c_small, double C_big,
                                            double* bound, double* log_bound, int* vacuous,
                                            double* K_T, double* kappa_T);

/* regime 0: M = L^a (regime_param = a); regime 1: L = k n / log log n
 * (regime_param = k). order_buf receives the symbolic exponent order. */
SPARC_API sparc_status sparc_exponent_scale(uint64_t n, int regime, double regime_param,
                                            double R_nats, uint32_t T, double* L, double* M,
                                            double* exponent_factor, char* order_buf,
                                            uint64_t order_buf_len);

SPARC_API sparc_status sparc_capacity_gap(double M, double kappa2, const sparc_code* code,
                                          double* delta_r_min, double* f_r_at_min,
                                          double* T_upper);

SPARC_API sparc_status sparc_f_r(double M, double delta_r, double kappa2, double* out);
SPARC_API sparc_status sparc_delta_r_min(double M, double kappa2, double* out);

/* Per-iteration increment lower bounds chi1 (first step) and chi (later
 * steps) for this code. delta 0 selects min(delta_R, 1/2). */
SPARC_API sparc_status sparc_chi_increments(const sparc_code* code, double kappa2, double delta,
                                            double* chi1, double* chi);

#ifdef __cplusplus
}
#endif

#endif /* SPARC_H */
