/* C interface to the inewton solvers and experiment harness.
 *
 * Every fallible call returns an inw_status; on failure the message is
 * available from inw_last_error() on the same thread until the next call.
 * Handles are opaque and owned by the caller, who releases them with the
 * matching *_free function. Strings returned by accessors stay valid for
 * the lifetime of the handle they came from.
 */
#ifndef INEWTON_INEWTON_H
#define INEWTON_INEWTON_H

#include <stddef.h>

#if defined(_WIN32)
#define INW_API __declspec(dllexport)
#else
#define INW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum inw_status {
  INW_OK = 0,
  INW_ERR_INVALID_ARGUMENT = 1,
  INW_ERR_CONFIG = 2,
  INW_ERR_PARSE = 3,
  INW_ERR_IO = 4,
  INW_ERR_NUMERICAL = 5,
  INW_ERR_CERTIFICATE = 6,
  INW_ERR_INTERNAL = 7
} inw_status;

typedef enum inw_solve_status {
  INW_SOLVE_CONVERGED = 0,
  INW_SOLVE_MAX_ITERATIONS = 1,
  INW_SOLVE_NUMERICAL_FAILURE = 2,
  INW_SOLVE_STALLED = 3
} inw_solve_status;

typedef struct inw_config inw_config;
typedef struct inw_result inw_result;
typedef struct inw_report inw_report;

/* One trace row. rho is NaN on the terminal record. */
typedef struct inw_record {
  size_t t;
  double F;
  double grad_norm;
  double lambda_min_est;
  double radius_or_sigma;
  double rho;
  int accepted;
  size_t sample_size;
  double step_norm;
  double eps_t;
} inw_record;

INW_API const char* inw_version(void);
INW_API const char* inw_last_error(void);
INW_API const char* inw_status_name(inw_status status);

INW_API inw_status inw_config_load(const char* path, inw_config** out);
INW_API inw_status inw_config_parse(const char* text, inw_config** out);
/* Same validation as a "key = value" line of a config file. */
INW_API inw_status inw_config_set(inw_config* config, const char* key, const char* value);
INW_API void inw_config_free(inw_config* config);

/* Runs the configured solver. A non-converged run is still INW_OK; query
 * inw_result_status. The trace is written to the config's "out" path when set. */
INW_API inw_status inw_solve(const inw_config* config, inw_result** out);
INW_API inw_solve_status inw_result_status(const inw_result* result);
INW_API int inw_result_converged(const inw_result* result);
INW_API size_t inw_result_successes(const inw_result* result);
INW_API size_t inw_result_failures(const inw_result* result);
INW_API double inw_result_value(const inw_result* result);
INW_API double inw_result_grad_norm(const inw_result* result);
/* Dense smallest Hessian eigenvalue at the final iterate; NaN when skipped (d > 500). */
INW_API double inw_result_lambda_min(const inw_result* result);
INW_API double inw_result_final_epsilon(const inw_result* result);
INW_API size_t inw_result_hessian_cost(const inw_result* result);
INW_API size_t inw_result_dim(const inw_result* result);
/* Copies the final iterate; len must equal inw_result_dim. */
INW_API inw_status inw_result_x(const inw_result* result, double* out, size_t len);
INW_API size_t inw_result_trace_length(const inw_result* result);
INW_API inw_status inw_result_record(const inw_result* result, size_t index, inw_record* out);
/* Full trace file contents (CSV rows and '#' footer). */
INW_API const char* inw_result_trace_csv(const inw_result* result);
INW_API const char* inw_result_diagnostic(const inw_result* result);
INW_API inw_status inw_result_write_trace(const inw_result* result, const char* path);
INW_API void inw_result_free(inw_result* result);

INW_API inw_status inw_verify_sampling(const inw_config* config, inw_report** out);
/* trials <= 0 uses the config's "trials" value. */
INW_API inw_status inw_compare(const inw_config* config, int trials, inw_report** out);
INW_API const char* inw_report_text(const inw_report* report);
INW_API int inw_report_passed(const inw_report* report);
INW_API void inw_report_free(inw_report* report);

#ifdef __cplusplus
}
#endif

#endif
