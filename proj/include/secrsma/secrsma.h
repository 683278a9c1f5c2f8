#ifndef SECRSMA_H
#define SECRSMA_H

/* C interface to the secrecy-constrained rate-splitting precoder library.
 * Every call returns a secrsma_status; on failure secrsma_last_error()
 * describes the problem (thread-local, valid until the next failing call
 * on the same thread). Handles are opaque and owned by the caller. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SECRSMA_API __declspec(dllexport)
#elif defined(__GNUC__)
#define SECRSMA_API __attribute__((visibility("default")))
#else
#define SECRSMA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  SECRSMA_OK = 0,
  SECRSMA_INVALID_ARGUMENT = 1,
  SECRSMA_DIMENSION = 2,
  SECRSMA_INFEASIBLE = 3,
  SECRSMA_SOLVER = 4,
  SECRSMA_IO = 5,
  SECRSMA_CONFIG = 6,
  SECRSMA_INTERNAL = 7
} secrsma_status;

typedef enum { SECRSMA_RS = 0, SECRSMA_MULP = 1 } secrsma_scheme;
typedef enum { SECRSMA_PERFECT = 0, SECRSMA_IMPERFECT = 1 } secrsma_csit;

typedef struct secrsma_config secrsma_config;
typedef struct secrsma_solution secrsma_solution;

SECRSMA_API const char* secrsma_version(void);
SECRSMA_API const char* secrsma_status_string(secrsma_status status);
SECRSMA_API const char* secrsma_last_error(void);

/* ---- experiment configs ---------------------------------------------- */

SECRSMA_API secrsma_status secrsma_config_load(const char* path, secrsma_config** out);
SECRSMA_API secrsma_status secrsma_config_parse(const char* ini_text, secrsma_config** out);
SECRSMA_API void secrsma_config_free(secrsma_config* cfg);

SECRSMA_API secrsma_status secrsma_config_set_seed(secrsma_config* cfg, uint64_t seed);
SECRSMA_API secrsma_status secrsma_config_set_out_dir(secrsma_config* cfg, const char* dir);
/* Replaces the SCA / outer alternating-loop stopping tolerance. */
SECRSMA_API secrsma_status secrsma_config_set_tolerance(secrsma_config* cfg, double tolerance);

/* Writes "fnv1a64:<16 hex digits>" (25 bytes with the terminator). */
SECRSMA_API secrsma_status secrsma_config_hash(const secrsma_config* cfg, char* buf, size_t len);
/* Copies the output directory; *needed receives the size including the terminator. */
SECRSMA_API secrsma_status secrsma_config_out_dir(const secrsma_config* cfg, char* buf, size_t len, size_t* needed);

typedef struct {
  size_t cells;
  size_t rows;
  size_t failed; /* per-trial rows without a secrecy-feasible solution */
  double seconds;
} secrsma_run_summary;

/* Results table, timings and manifest under the config's output directory. */
SECRSMA_API secrsma_status secrsma_run_sweep(const secrsma_config* cfg, unsigned jobs, secrsma_run_summary* summary);
/* Line-delimited JSON convergence traces for every trace kappa. */
SECRSMA_API secrsma_status secrsma_run_trace(const secrsma_config* cfg, unsigned jobs, secrsma_run_summary* summary);

/* Oracle suites. *report is allocated by the library; release it with
 * secrsma_string_free. */
SECRSMA_API secrsma_status secrsma_validate(uint64_t seed, unsigned jobs, double tolerance, int* passed,
                                            char** report);
SECRSMA_API void secrsma_string_free(char* s);

/* ---- single instances -------------------------------------------------- */

typedef struct {
  size_t users;
  size_t antennas;
  /* column-major antennas x users; column k is h_k. channel_imag may be NULL. */
  const double* channel_real;
  const double* channel_imag;
  const double* weights;    /* users entries; NULL means uniform */
  const double* thresholds; /* users entries; NULL means all zero */
  double snr_db;
  secrsma_scheme scheme;
  secrsma_csit csit;
  double error_variance; /* imperfect CSIT: sigma_e^2 in [0, 1] */
  size_t samples;        /* imperfect CSIT: M */
  uint64_t seed;         /* imperfect CSIT: sample seed */
  double kappa;
  double tolerance;
} secrsma_problem;

SECRSMA_API void secrsma_problem_init(secrsma_problem* p);
SECRSMA_API secrsma_status secrsma_solve(const secrsma_problem* p, secrsma_solution** out);
SECRSMA_API void secrsma_solution_free(secrsma_solution* s);

SECRSMA_API secrsma_status secrsma_solution_wsr(const secrsma_solution* s, double* wsr);
/* Each array receives `users` entries; any pointer may be NULL. */
SECRSMA_API secrsma_status secrsma_solution_rates(const secrsma_solution* s, double* common, double* priv,
                                                  double* secrecy);
/* Column-major antennas x (users + 1); column 0 is the common precoder. */
SECRSMA_API secrsma_status secrsma_solution_precoders(const secrsma_solution* s, double* real, double* imag);
SECRSMA_API secrsma_status secrsma_solution_info(const secrsma_solution* s, int* iterations, int* converged,
                                                 int* feasible);

#ifdef __cplusplus
}
#endif

#endif
