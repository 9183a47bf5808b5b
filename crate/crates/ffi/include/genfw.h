#ifndef GENFW_H
#define GENFW_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GenfwStatus {
  GENFW_STATUS_OK = 0,
  GENFW_STATUS_NULL_POINTER = 1,
  GENFW_STATUS_INVALID_ARGUMENT = 2,
  GENFW_STATUS_DIMENSION_MISMATCH = 3,
  GENFW_STATUS_NOT_POSITIVE_DEFINITE = 4,
  GENFW_STATUS_INNER_LOOP_CAP = 5,
  GENFW_STATUS_OUT_OF_RANGE = 6,
  GENFW_STATUS_INTERNAL = 7,
} GenfwStatus;

typedef enum GenfwSetKind {
  /**
   * Euclidean ball around the origin; `param` is the radius.
   */
  GENFW_SET_KIND_L2_BALL = 0,
  /**
   * `{x >= 0, sum x = param}`.
   */
  GENFW_SET_KIND_SIMPLEX = 1,
  /**
   * Box `[-param, param]^d`.
   */
  GENFW_SET_KIND_L_INF_BALL = 2,
} GenfwSetKind;

typedef enum GenfwSolver {
  GENFW_SOLVER_CLASSIC = 0,
  GENFW_SOLVER_ADAPTIVE_CLASSIC = 1,
  GENFW_SOLVER_L0L1 = 2,
  GENFW_SOLVER_ADAPT_L0L1 = 3,
} GenfwSolver;

typedef enum GenfwTermination {
  GENFW_TERMINATION_GAP_TOL = 0,
  GENFW_TERMINATION_MAX_ITER = 1,
  GENFW_TERMINATION_ZERO_DIRECTION = 2,
} GenfwTermination;

typedef struct GenfwProblem GenfwProblem;

typedef struct GenfwTrace GenfwTrace;

typedef struct GenfwOptions {
  size_t max_iter;
  double gap_tol;
  /**
   * Adaptive `(L0, L1)` solver only.
   */
  double rho;
  double l0_init;
  double l1_init;
} GenfwOptions;

typedef struct GenfwRecord {
  size_t iter;
  double f;
  double gap;
  double alpha;
  double a_k;
  double l0_k;
  double l1_k;
  double grad_norm;
  uint32_t inner_checks;
  /**
   * 1 when `L0 <= L1 ||g||`, else 0.
   */
  uint8_t t_regime;
} GenfwRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Defaults matching the library: 10000 iterations, gap tolerance 1e-6,
 * `rho = 2`, initial `L0 = L1 = 1`.
 */
struct GenfwOptions genfw_options_default(void);

/**
 * Logistic regression on the row-major `n x d` matrix `a` with labels `±1`.
 *
 * # Safety
 * `a` must hold `n * d` doubles, `labels` `n` doubles, and `out` must be
 * writable.
 */
enum GenfwStatus genfw_problem_logistic_new(const double *a,
                                            const double *labels,
                                            size_t n,
                                            size_t d,
                                            enum GenfwSetKind set,
                                            double set_param,
                                            struct GenfwProblem **out);

/**
 * `x^T Q x / 2 - b^T x` with the row-major symmetric positive definite `q`.
 *
 * # Safety
 * `q` must hold `d * d` doubles, `b` `d` doubles, and `out` must be writable.
 */
enum GenfwStatus genfw_problem_quadratic_new(const double *q,
                                             const double *b,
                                             size_t d,
                                             enum GenfwSetKind set,
                                             double set_param,
                                             struct GenfwProblem **out);

/**
 * Replaces the starting point.
 *
 * # Safety
 * `problem` must come from a constructor here; `x0` must hold `len` doubles.
 */
enum GenfwStatus genfw_problem_set_start(struct GenfwProblem *problem,
                                         const double *x0,
                                         size_t len);

/**
 * Dimension of the problem, or 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t genfw_problem_dim(const struct GenfwProblem *problem);

/**
 * # Safety
 * `problem` must be null or a live handle; it is invalid afterwards.
 */
void genfw_problem_free(struct GenfwProblem *problem);

/**
 * Runs `solver` on `problem`. A null `options` uses the defaults.
 *
 * # Safety
 * `problem` must be a live handle, `options` null or valid, `out` writable.
 */
enum GenfwStatus genfw_solve(const struct GenfwProblem *problem,
                             enum GenfwSolver solver,
                             const struct GenfwOptions *options,
                             struct GenfwTrace **out);

/**
 * Number of records, or 0 for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
size_t genfw_trace_len(const struct GenfwTrace *trace);

/**
 * # Safety
 * `trace` must be a live handle and `out` writable.
 */
enum GenfwStatus genfw_trace_record(const struct GenfwTrace *trace,
                                    size_t index,
                                    struct GenfwRecord *out);

/**
 * # Safety
 * `trace` must be a live handle and `out` writable.
 */
enum GenfwStatus genfw_trace_termination(const struct GenfwTrace *trace,
                                         enum GenfwTermination *out);

/**
 * Copies the final iterate into `buf`, which must hold exactly the problem
 * dimension.
 *
 * # Safety
 * `trace` must be a live handle and `buf` writable for `len` doubles.
 */
enum GenfwStatus genfw_trace_final_point(const struct GenfwTrace *trace, double *buf, size_t len);

/**
 * # Safety
 * `trace` must be null or a live handle; it is invalid afterwards.
 */
void genfw_trace_free(struct GenfwTrace *trace);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL, or
 * 0 when there is none.
 *
 * # Safety
 * `buf` must be null or writable for `len` bytes.
 */
size_t genfw_last_error_message(char *buf, size_t len);

/**
 * Static description of a status code.
 */
const char *genfw_status_str(enum GenfwStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GENFW_H */
