/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the split equilibrium solver.
 *
 * Objects are opaque handles created by the library and released with the
 * matching *_free function. Every fallible call returns a spliteq_status;
 * on failure spliteq_last_error() describes the problem (per thread, valid
 * until the next failing call on that thread).
 */
#ifndef SPLITEQ_SPLITEQ_H
#define SPLITEQ_SPLITEQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SPLITEQ_BUILDING)
#define SPLITEQ_API __declspec(dllexport)
#else
#define SPLITEQ_API __declspec(dllimport)
#endif
#else
#define SPLITEQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spliteq_status {
  SPLITEQ_OK = 0,
  SPLITEQ_E_INVALID_ARGUMENT = 1, /* bad argument or null handle */
  SPLITEQ_E_PARSE = 2,            /* problem file schema violation */
  SPLITEQ_E_VALIDATION = 3,       /* data breaks an invariant (PSD, dims) */
  SPLITEQ_E_IO = 4,
  SPLITEQ_E_NUMERIC = 5,          /* e.g. empty hybrid outer approximation */
  SPLITEQ_E_INTERNAL = 6
} spliteq_status;

typedef enum spliteq_mode {
  SPLITEQ_MODE_WEAK = 0,
  SPLITEQ_MODE_HYBRID = 1
} spliteq_mode;

typedef enum spliteq_outcome {
  SPLITEQ_OUTCOME_CONVERGED = 0,
  SPLITEQ_OUTCOME_MAX_ITER = 1
} spliteq_outcome;

typedef struct spliteq_problem spliteq_problem;
typedef struct spliteq_report spliteq_report;
typedef struct spliteq_result spliteq_result;

typedef struct spliteq_problem_info {
  size_t n;  /* number of f_i */
  size_t m;  /* number of F_j */
  size_t d1;
  size_t d2;
  int has_known_solution;
  int solution_unique;
  uint64_t seed;
} spliteq_problem_info;

/* Solver parameters. Fill with spliteq_config_default, then override. */
typedef struct spliteq_config {
  double lambda;
  double mu;
  double r; /* constant proximal parameter r_n */
  double r_min;
  double tol_residual;
  size_t max_iter;
  double inner_tol;
  size_t inner_max_iter;
  size_t workers; /* 0 = hardware concurrency */
} spliteq_config;

typedef struct spliteq_solve_options {
  /* Starting point of length d1, or NULL for a seeded random point of C. */
  const double* x0;
  size_t x0_len;
  uint64_t seed;
  /* When non-NULL the trace CSV is written here, flushed per iteration. */
  const char* trace_csv_path;
  /* Zero writes elapsed_ms as 0 so runs compare bytewise. */
  int trace_timing;
} spliteq_solve_options;

SPLITEQ_API const char* spliteq_version(void);
SPLITEQ_API const char* spliteq_last_error(void);
SPLITEQ_API const char* spliteq_status_string(spliteq_status status);

/* Problems */
SPLITEQ_API spliteq_status spliteq_problem_generate(size_t n, size_t m, size_t d1,
                                                    size_t d2, uint64_t seed,
                                                    int make_unique,
                                                    spliteq_problem** out);
SPLITEQ_API spliteq_status spliteq_problem_load(const char* path,
                                                spliteq_problem** out);
SPLITEQ_API spliteq_status spliteq_problem_save(const spliteq_problem* problem,
                                                const char* path);
SPLITEQ_API spliteq_status spliteq_problem_info_get(const spliteq_problem* problem,
                                                    spliteq_problem_info* out);
/* Copies the known solution (length d1) into out. */
SPLITEQ_API spliteq_status spliteq_problem_known_solution(
    const spliteq_problem* problem, double* out, size_t len);
SPLITEQ_API void spliteq_problem_free(spliteq_problem* problem);

/* Configuration */
SPLITEQ_API spliteq_status spliteq_config_default(const spliteq_problem* problem,
                                                  spliteq_config* out);

/* Validation. With full != 0 the report also covers the sampled
 * monotonicity / Lipschitz-type checks and the known-solution certificate. */
SPLITEQ_API spliteq_status spliteq_validate(const spliteq_problem* problem,
                                            const spliteq_config* config,
                                            int full, uint64_t seed,
                                            spliteq_report** out);
SPLITEQ_API int spliteq_report_passed(const spliteq_report* report);
SPLITEQ_API const char* spliteq_report_text(const spliteq_report* report);
SPLITEQ_API void spliteq_report_free(spliteq_report* report);

/* Solving */
SPLITEQ_API void spliteq_solve_options_init(spliteq_solve_options* options);
SPLITEQ_API spliteq_status spliteq_solve(const spliteq_problem* problem,
                                         const spliteq_config* config,
                                         spliteq_mode mode,
                                         const spliteq_solve_options* options,
                                         spliteq_result** out);
SPLITEQ_API spliteq_outcome spliteq_result_outcome(const spliteq_result* result);
SPLITEQ_API size_t spliteq_result_iterations(const spliteq_result* result);
SPLITEQ_API double spliteq_result_residual(const spliteq_result* result);
/* Distance of the final iterate to the known solution, or NaN. */
SPLITEQ_API double spliteq_result_distance_to_known(const spliteq_result* result);
SPLITEQ_API size_t spliteq_result_trace_length(const spliteq_result* result);
SPLITEQ_API spliteq_status spliteq_result_x(const spliteq_result* result,
                                            double* out, size_t len);
/* Non-empty when the run had something worth reporting (projected start,
 * unconverged inner solves). */
SPLITEQ_API const char* spliteq_result_warnings(const spliteq_result* result);
SPLITEQ_API spliteq_status spliteq_result_write_solution(const spliteq_result* result,
                                                         const char* path);
SPLITEQ_API spliteq_status spliteq_result_write_trace(const spliteq_result* result,
                                                      const char* path,
                                                      int timing);
SPLITEQ_API void spliteq_result_free(spliteq_result* result);

#ifdef __cplusplus
}
#endif

#endif /* SPLITEQ_SPLITEQ_H */
