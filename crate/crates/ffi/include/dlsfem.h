#ifndef DLSFEM_H
#define DLSFEM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DlsfemStatus {
  DLSFEM_STATUS_OK = 0,
  DLSFEM_STATUS_NULL_POINTER = 1,
  DLSFEM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Singular or rank-deficient linear algebra.
   */
  DLSFEM_STATUS_NUMERICAL = 3,
  DLSFEM_STATUS_IO = 4,
  /**
   * The estimator vanished, so nothing could be marked.
   */
  DLSFEM_STATUS_ZERO_ESTIMATOR = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  DLSFEM_STATUS_INTERNAL = 6,
} DlsfemStatus;

typedef enum DlsfemDomain {
  DLSFEM_DOMAIN_SQUARE = 0,
  DLSFEM_DOMAIN_RECTANGLE = 1,
  DLSFEM_DOMAIN_L_SHAPE = 2,
} DlsfemDomain;

typedef enum DlsfemWeight {
  DLSFEM_WEIGHT_ONE = 0,
  DLSFEM_WEIGHT_DIAMETER = 1,
  DLSFEM_WEIGHT_WIDTH = 2,
  DLSFEM_WEIGHT_FRIEDRICHS = 3,
  DLSFEM_WEIGHT_ELL_OVER_PI = 4,
} DlsfemWeight;

typedef enum DlsfemSolver {
  DLSFEM_SOLVER_SPD = 0,
  DLSFEM_SOLVER_SADDLE = 1,
  DLSFEM_SOLVER_BOTH = 2,
} DlsfemSolver;

/**
 * Opaque handle to the records and final mesh of an adaptive run.
 */
typedef struct DlsfemHistory DlsfemHistory;

/**
 * Opaque triangulation handle.
 */
typedef struct DlsfemMesh DlsfemMesh;

/**
 * Experiment parameters; fill with [`dlsfem_config_default`] first.
 */
typedef struct DlsfemConfig {
  enum DlsfemDomain domain;
  double ell;
  uint32_t degree;
  /**
   * `1` (natural penalty) or `-1` (over-penalized).
   */
  int32_t alpha;
  enum DlsfemWeight weight;
  double theta;
  size_t max_ndof;
  /**
   * `0` means no level limit.
   */
  size_t max_levels;
  enum DlsfemSolver solver;
  /**
   * Non-zero selects Jacobi-preconditioned CG instead of the direct solver.
   */
  uint8_t use_cg;
  /**
   * Non-zero enables parallel assembly.
   */
  uint8_t parallel;
  uint64_t seed;
} DlsfemConfig;

/**
 * One level of an adaptive run.
 */
typedef struct DlsfemRecord {
  size_t level;
  size_t ndof;
  size_t ntriangles;
  double estimator;
  double err_energy_rel;
  double err_weighted;
  double efficiency;
  uint8_t unreliable;
  double relative_residual;
  double c_omega;
} DlsfemRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *dlsfem_version(void);

/**
 * Message of the last failure on this thread, or null. Valid until the next failing call on this thread.
 */
const char *dlsfem_last_error(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum DlsfemStatus dlsfem_config_default(struct DlsfemConfig *out);

/**
 * Initial triangulation of a benchmark domain.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DlsfemStatus dlsfem_mesh_new(enum DlsfemDomain domain, double ell, struct DlsfemMesh **out);

/**
 * # Safety
 * `mesh` must be null or a handle from this library that has not been freed.
 */
void dlsfem_mesh_free(struct DlsfemMesh *mesh);

/**
 * # Safety
 * `mesh` must be a live handle; the output pointers may be null.
 */
enum DlsfemStatus dlsfem_mesh_counts(const struct DlsfemMesh *mesh,
                                     size_t *vertices,
                                     size_t *triangles,
                                     size_t *edges);

/**
 * Newest-vertex bisection of the `n_marked` triangles in `marked`; the input mesh is untouched.
 *
 * # Safety
 * `mesh` must be a live handle, `marked` must point to `n_marked` values (or be null when
 * `n_marked` is 0) and `out` must be valid for writes.
 */
enum DlsfemStatus dlsfem_mesh_refine(const struct DlsfemMesh *mesh,
                                     const size_t *marked,
                                     size_t n_marked,
                                     struct DlsfemMesh **out);

/**
 * # Safety
 * `mesh` must be a live handle and `out` valid for writes.
 */
enum DlsfemStatus dlsfem_mesh_refine_uniform(const struct DlsfemMesh *mesh,
                                             struct DlsfemMesh **out);

/**
 * Writes the plain-text mesh dump to `path`.
 *
 * # Safety
 * `mesh` must be a live handle and `path` a NUL-terminated string.
 */
enum DlsfemStatus dlsfem_mesh_dump(const struct DlsfemMesh *mesh, const char *path);

/**
 * Side-condition diagnostic of `mesh`.
 *
 * # Safety
 * `mesh` must be a live handle; `lhs` and `rhs` must be valid for writes.
 */
enum DlsfemStatus dlsfem_side_condition_diagnostic(const struct DlsfemMesh *mesh,
                                                   double *lhs,
                                                   double *rhs);

/**
 * Dörfler marking of `n` squared indicators. `marked` needs room for `n`
 * ids; the count written is stored in `n_marked`.
 *
 * # Safety
 * `eta_sq` must point to `n` values and `marked` to `n` writable slots.
 */
enum DlsfemStatus dlsfem_dorfler_mark(const double *eta_sq,
                                      size_t n,
                                      double theta,
                                      size_t *marked,
                                      size_t *n_marked);

/**
 * Runs the adaptive loop; no file is written (see [`dlsfem_history_write_csv`]).
 *
 * # Safety
 * `config` must be readable and `out` valid for writes.
 */
enum DlsfemStatus dlsfem_experiment_run(const struct DlsfemConfig *config,
                                        struct DlsfemHistory **out);

/**
 * Number of completed levels; 0 for a null handle.
 *
 * # Safety
 * `history` must be null or a live handle.
 */
size_t dlsfem_history_len(const struct DlsfemHistory *history);

/**
 * # Safety
 * `history` must be a live handle and `out` valid for writes.
 */
enum DlsfemStatus dlsfem_history_row(const struct DlsfemHistory *history,
                                     size_t index,
                                     struct DlsfemRecord *out);

/**
 * # Safety
 * `history` must be a live handle and `path` a NUL-terminated string.
 */
enum DlsfemStatus dlsfem_history_write_csv(const struct DlsfemHistory *history, const char *path);

/**
 * Copy of the last mesh of the run.
 *
 * # Safety
 * `history` must be a live handle and `out` valid for writes.
 */
enum DlsfemStatus dlsfem_history_final_mesh(const struct DlsfemHistory *history,
                                            struct DlsfemMesh **out);

/**
 * # Safety
 * `history` must be null or a handle from this library that has not been freed.
 */
void dlsfem_history_free(struct DlsfemHistory *history);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DLSFEM_H */
