#ifndef OBSDICT_OBSDICT_H
#define OBSDICT_OBSDICT_H

/* C ABI for the observability/frame toolkit. All handles are opaque and owned
 * by the caller; every function that can fail returns an obsd_status and
 * leaves a thread-local message retrievable via obsd_last_error_message. */

#include <stddef.h>

#if defined(_WIN32)
#if defined(OBSDICT_BUILDING)
#define OBSD_API __declspec(dllexport)
#else
#define OBSD_API __declspec(dllimport)
#endif
#else
#define OBSD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum obsd_status {
  OBSD_OK = 0,
  OBSD_ERR_PARSE = 1,
  OBSD_ERR_SCHEMA = 2,
  OBSD_ERR_INVARIANT = 3,
  OBSD_ERR_DIMENSION_MISMATCH = 4,
  OBSD_ERR_NON_FINITE = 5,
  OBSD_ERR_OVERFLOW = 6,
  OBSD_ERR_NOT_DIAGONALIZABLE = 7,
  OBSD_ERR_QUADRATURE = 8,
  OBSD_ERR_TAIL_NOT_CERTIFIABLE = 9,
  OBSD_ERR_CONVERGENCE = 10,
  OBSD_ERR_NOT_APPLICABLE = 11,
  OBSD_ERR_NOT_OBSERVABLE = 12,
  OBSD_ERR_DOMAIN = 13,
  OBSD_ERR_GUARD_VIOLATION = 14,
  OBSD_ERR_NOT_SELF_ADJOINT = 15,
  OBSD_ERR_NOT_STRONGLY_STABLE = 16,
  OBSD_ERR_IO = 17,
  OBSD_ERR_INVALID_ARGUMENT = 18,
  OBSD_ERR_INTERNAL = 99
} obsd_status;

typedef struct obsd_system obsd_system;
typedef struct obsd_pair obsd_pair;
typedef struct obsd_observations obsd_observations;
typedef struct obsd_report obsd_report;

typedef enum obsd_format { OBSD_FORMAT_JSON = 0, OBSD_FORMAT_TEXT = 1, OBSD_FORMAT_TSV = 2 } obsd_format;

typedef enum obsd_regime {
  OBSD_REGIME_DISC = 0,
  OBSD_REGIME_HALFPLANE = 1,
  OBSD_REGIME_FINITE = 2
} obsd_regime;

/* Negative/NaN fields mean "use the default". */
typedef struct obsd_options {
  double eob_rel_tol;
  double rank_rel_tol; /* <= 0: max(dim) * machine epsilon */
  double delta_floor;
  double c1_floor;
  double c2_cap;
  double epsilon_guard;
  int trend_window; /* <= 0: max(5, N/4) */
  double trend_tol;
  obsd_format format;
  obsd_regime regime;
  const double* taus; /* kalman horizons; NULL for defaults */
  size_t n_taus;
  const double* deltas; /* sweep spacings; NULL for defaults */
  size_t n_deltas;
  long truncation; /* kalman discrete truncation; < 0: dim - 1 */
  double tau;      /* criteria/bessel-op horizon; <= 0: unset */
  double tau_max;  /* bessel-op search ceiling; <= 0: unset */
} obsd_options;

OBSD_API void obsd_options_init(obsd_options* opts);

OBSD_API const char* obsd_version(void);
OBSD_API const char* obsd_last_error_message(void);
OBSD_API const char* obsd_status_name(obsd_status status);
/* 2 for input errors, 3 for numerical failures, 0 for OBSD_OK. */
OBSD_API int obsd_status_exit_code(obsd_status status);

OBSD_API obsd_status obsd_system_load_file(const char* path, obsd_system** out);
OBSD_API obsd_status obsd_system_load_string(const char* json, obsd_system** out);
OBSD_API size_t obsd_system_dim(const obsd_system* sys);
OBSD_API void obsd_system_free(obsd_system* sys);

OBSD_API obsd_status obsd_pair_load_file(const char* path, obsd_pair** out);
OBSD_API obsd_status obsd_pair_load_string(const char* json, obsd_pair** out);
OBSD_API void obsd_pair_free(obsd_pair* pair);

/* Observation CSV is validated against the system's sampling index map. */
OBSD_API obsd_status obsd_observations_load_file(const obsd_system* sys, const char* path,
                                                 obsd_observations** out);
OBSD_API obsd_status obsd_observations_load_string(const obsd_system* sys, const char* csv,
                                                   obsd_observations** out);
OBSD_API void obsd_observations_free(obsd_observations* obs);

/* command: check, reconstruct, criteria, mobius, duality, sweep, kalman,
 * truncation, bessel-op. Inputs not used by the command may be NULL. */
OBSD_API obsd_status obsd_run(const char* command, const obsd_system* sys, const obsd_pair* pair,
                              const obsd_observations* obs, const obsd_options* opts,
                              obsd_report** out);
OBSD_API const char* obsd_report_text(const obsd_report* report);
OBSD_API int obsd_report_verdict(const obsd_report* report);
OBSD_API void obsd_report_free(obsd_report* report);

/* Granular numerics. Complex arrays are interleaved (re, im), matrices row-major. */
OBSD_API obsd_status obsd_frame_bounds(const obsd_system* sys, double* c1, double* c2,
                                       size_t* rank, int* frame_eob);
/* x0_out must hold 2 * dim doubles. */
OBSD_API obsd_status obsd_reconstruct(const obsd_system* sys, const obsd_observations* obs,
                                      double* x0_out, double* residual);
/* a and out hold 2 * n * n doubles. */
OBSD_API obsd_status obsd_matrix_exponential(const double* a, size_t n, double t, double* out);
/* lambdas holds 2 * n doubles; every point must lie in the open unit disc. */
OBSD_API obsd_status obsd_carleson_disc(const double* lambdas, size_t n, double* inf_product);

#ifdef __cplusplus
}
#endif

#endif /* OBSDICT_OBSDICT_H */
