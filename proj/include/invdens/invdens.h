/* C interface to the invdens library. All functions report failures through
 * an invdens_status; the message of the last failure on the calling thread is
 * available from invdens_last_error(). Handles are opaque and owned by the
 * caller, who releases them with the matching *_free function. */
#ifndef INVDENS_INVDENS_H
#define INVDENS_INVDENS_H

#include <stddef.h>
#include <stdint.h>

#if defined(INVDENS_BUILDING_LIBRARY)
#define INVDENS_API __attribute__((visibility("default")))
#else
#define INVDENS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum invdens_status {
  INVDENS_OK = 0,
  INVDENS_E_PARAMETER = 1,
  INVDENS_E_NUMERICAL = 2,
  INVDENS_E_UNSUPPORTED = 3,
  INVDENS_E_CONFIG = 4,
  INVDENS_E_DIMENSIONALITY = 5,
  INVDENS_E_SIMULATION = 6,
  INVDENS_E_IO = 7,
  INVDENS_E_INVALID_HANDLE = 8,
  INVDENS_E_UNKNOWN = 9
} invdens_status;

typedef struct invdens_series invdens_series;
typedef struct invdens_sample invdens_sample;
typedef struct invdens_kernel invdens_kernel;
typedef struct invdens_weights invdens_weights;

typedef struct invdens_scheme {
  size_t n;
  double delta;
  double tau;
  uint64_t seed;
} invdens_scheme;

typedef struct invdens_run_options {
  /* 0 selects INVDENS_WORKERS or the hardware concurrency. */
  size_t workers;
  /* Non-zero prepends a "# generated" line to every CSV. */
  int timestamp;
} invdens_run_options;

INVDENS_API const char* invdens_version(void);
INVDENS_API const char* invdens_last_error(void);
INVDENS_API const char* invdens_status_name(invdens_status status);
INVDENS_API void invdens_string_free(char* text);

/* Observation series */
INVDENS_API invdens_status invdens_simulate_ou(double theta, size_t dim, const invdens_scheme* scheme,
                                               invdens_series** out);
/* Replication `index` of the experiment described by a JSON config. */
INVDENS_API invdens_status invdens_simulate_config(const char* config_json, size_t index,
                                                   invdens_series** out);
INVDENS_API invdens_status invdens_add_noise(const invdens_series* latent, double tau, uint64_t seed,
                                             invdens_series** out);
INVDENS_API invdens_status invdens_series_read_csv(const char* path, double tau, invdens_series** out);
INVDENS_API invdens_status invdens_series_write_csv(const invdens_series* series, const char* path);
INVDENS_API invdens_status invdens_series_info(const invdens_series* series, size_t* n, size_t* dim,
                                               double* delta, double* tau);
/* Copies the (n + 1) * dim observations, row-major. */
INVDENS_API invdens_status invdens_series_observed(const invdens_series* series, double* buffer,
                                                   size_t length);
INVDENS_API void invdens_series_free(invdens_series* series);

/* Pre-averaging */
INVDENS_API invdens_status invdens_preaverage(const invdens_series* series, size_t p,
                                              invdens_sample** out);
INVDENS_API invdens_status invdens_sample_info(const invdens_sample* sample, size_t* count, size_t* dim,
                                               double* tau_tilde);
INVDENS_API void invdens_sample_free(invdens_sample* sample);
INVDENS_API invdens_status invdens_effective_noise(double tau, double delta, size_t p, double* out);

/* Kernels and debiasing weights */
INVDENS_API invdens_status invdens_kernel_create(int order, const double* bandwidths, size_t dim,
                                                 invdens_kernel** out);
INVDENS_API invdens_status invdens_kernel_eval(const invdens_kernel* kernel, const double* y,
                                               double* out);
INVDENS_API void invdens_kernel_free(invdens_kernel* kernel);
INVDENS_API invdens_status invdens_weights_create(int order, invdens_weights** out);
/* Copies order + 1 weights. */
INVDENS_API invdens_status invdens_weights_values(const invdens_weights* weights, double* u,
                                                  size_t length);
/* Decimal string of det(A); release with invdens_string_free. */
INVDENS_API invdens_status invdens_weights_determinant(const invdens_weights* weights, char** out);
INVDENS_API void invdens_weights_free(invdens_weights* weights);

/* Estimators at one point x of length dim */
INVDENS_API invdens_status invdens_nu_hat(const invdens_sample* sample, const invdens_kernel* kernel,
                                          const double* x, size_t dim, double* out);
INVDENS_API invdens_status invdens_mu_hat(const invdens_sample* sample, const invdens_kernel* kernel,
                                          const invdens_weights* weights, const double* x, size_t dim,
                                          double* out);
INVDENS_API invdens_status invdens_naive(const invdens_series* series, const invdens_kernel* kernel,
                                         const double* x, size_t dim, double* out);

/* Hyperparameters. mode: 0 numeric, 1 debias. */
INVDENS_API invdens_status invdens_choose_p(double tau, double delta, double alpha1, int mode,
                                            size_t* out);
/* key=value plan text; release with invdens_string_free. */
INVDENS_API invdens_status invdens_plan(const double* alpha, size_t dim, size_t n, double delta,
                                        double tau, int mode, char** out);
INVDENS_API invdens_status invdens_plan_config(const char* config_json, char** out);

/* Config-driven workflows. Paths are files except out_dir. */
INVDENS_API invdens_status invdens_simulate_to_csv(const char* config_json, const char* out_csv);
/* series_csv may be NULL, in which case replication 0 is simulated. */
INVDENS_API invdens_status invdens_estimate(const char* config_json, const char* series_csv,
                                            const char* out_csv, int timestamp);
/* Adaptive selection at the first evaluation point; writes the trace CSV. */
INVDENS_API invdens_status invdens_adapt(const char* config_json, const char* out_csv, int timestamp,
                                         char** summary);
/* kind: "table1", "table2", "surface" or "rates". summary may be NULL. */
INVDENS_API invdens_status invdens_bench_run(const char* kind, const char* config_json,
                                             const char* out_dir, const invdens_run_options* options,
                                             char** summary);

#ifdef __cplusplus
}
#endif

#endif
