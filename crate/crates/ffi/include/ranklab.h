#ifndef RANKLAB_H
#define RANKLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RanklabStatus {
  RANKLAB_STATUS_OK = 0,
  RANKLAB_STATUS_INVALID_INPUT = 1,
  RANKLAB_STATUS_PARSE = 2,
  RANKLAB_STATUS_NOT_CONVERGED = 3,
  RANKLAB_STATUS_NUMERIC = 4,
  RANKLAB_STATUS_IO = 5,
  RANKLAB_STATUS_NULL_POINTER = 6,
  RANKLAB_STATUS_BUFFER_TOO_SMALL = 7,
  RANKLAB_STATUS_PANIC = 8,
} RanklabStatus;

typedef enum RanklabScenario {
  RANKLAB_SCENARIO_S1 = 0,
  RANKLAB_SCENARIO_S2 = 1,
  RANKLAB_SCENARIO_S2B = 2,
} RanklabScenario;

typedef enum RanklabDiversity {
  RANKLAB_DIVERSITY_NONE = 0,
  RANKLAB_DIVERSITY_PD1 = 1,
  RANKLAB_DIVERSITY_PD2 = 2,
  RANKLAB_DIVERSITY_PD3 = 3,
} RanklabDiversity;

typedef enum RanklabPd2Mode {
  RANKLAB_PD2_MODE_TRANSITION_REPLAY = 0,
  RANKLAB_PD2_MODE_DUPLICATE_DEPTH = 1,
} RanklabPd2Mode;

typedef enum RanklabPrd {
  RANKLAB_PRD_OFF = 0,
  RANKLAB_PRD_REVISIT = 1,
  RANKLAB_PRD_LITERAL = 2,
} RanklabPrd;

/**
 * Opaque graph handle.
 */
typedef struct RanklabGraph RanklabGraph;

/**
 * Random-walk settings; start from [`ranklab_walk_config_default`].
 */
typedef struct RanklabWalkConfig {
  double epsilon;
  uint64_t steps;
  uint64_t seed;
  size_t walkers;
  size_t window;
  enum RanklabDiversity diversity;
  enum RanklabPd2Mode pd2_mode;
  enum RanklabPrd prd;
} RanklabWalkConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until
 * the next call into the library.
 */
const char *ranklab_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ranklab_version(void);

/**
 * Builds a graph from `m` edges `src[k] -> dst[k]` with 0-based ids.
 *
 * # Safety
 * `src` and `dst` must point to `m` readable values (or be NULL when `m`
 * is 0); `out` must be writable.
 */
enum RanklabStatus ranklab_graph_new(size_t n,
                                     const uint32_t *src,
                                     const uint32_t *dst,
                                     size_t m,
                                     struct RanklabGraph **out);

/**
 * Loads an edge list with 1-based ids.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum RanklabStatus ranklab_graph_load(const char *path, struct RanklabGraph **out);

/**
 * Generates a synthetic scenario graph with `L = 100 n` link attempts.
 *
 * # Safety
 * `out` must be writable.
 */
enum RanklabStatus ranklab_graph_generate(enum RanklabScenario scenario,
                                          size_t n,
                                          double alpha,
                                          uint64_t seed,
                                          struct RanklabGraph **out);

/**
 * # Safety
 * `g` must come from this library and not be used afterwards. NULL is a
 * no-op.
 */
void ranklab_graph_free(struct RanklabGraph *g);

/**
 * Node count, 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live handle.
 */
size_t ranklab_graph_node_count(const struct RanklabGraph *g);

/**
 * Distinct edge count, 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live handle.
 */
size_t ranklab_graph_edge_count(const struct RanklabGraph *g);

/**
 * Analytic PageRank. `tol <= 0` and `max_iter == 0` select the defaults.
 *
 * # Safety
 * `g` must be a live handle; `out` must hold `len` doubles.
 */
enum RanklabStatus ranklab_pagerank(const struct RanklabGraph *g,
                                    double epsilon,
                                    double tol,
                                    size_t max_iter,
                                    double *out,
                                    size_t len);

/**
 * Reliability `F` of the analytic scores.
 *
 * # Safety
 * `g` must be a live handle; `out` must hold `len` doubles.
 */
enum RanklabStatus ranklab_reliability(const struct RanklabGraph *g,
                                       double epsilon,
                                       double alpha,
                                       double beta,
                                       bool include_damping,
                                       double *out,
                                       size_t len);

struct RanklabWalkConfig ranklab_walk_config_default(void);

/**
 * Normalized visit counters of a Monte-Carlo walk.
 *
 * # Safety
 * `g` must be a live handle, `cfg` readable, `out` must hold `len` doubles.
 */
enum RanklabStatus ranklab_walk(const struct RanklabGraph *g,
                                const struct RanklabWalkConfig *cfg,
                                double *out,
                                size_t len);

/**
 * Average CDF deviation of two score vectors in index order.
 *
 * # Safety
 * `x1` and `x2` must hold `len` doubles; `out` must be writable.
 */
enum RanklabStatus ranklab_average_deviation(const double *x1,
                                             const double *x2,
                                             size_t len,
                                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RANKLAB_H */
