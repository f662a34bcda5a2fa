#ifndef TGRMPT_H
#define TGRMPT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TgrStatus {
  TGR_STATUS_OK = 0,
  TGR_STATUS_NULL_POINTER = 1,
  TGR_STATUS_INVALID_ARGUMENT = 2,
  TGR_STATUS_DIMENSION_MISMATCH = 3,
  TGR_STATUS_FRAME_ORDER = 4,
  TGR_STATUS_EMPTY_GROUND_TRUTH = 5,
  TGR_STATUS_BUFFER_TOO_SMALL = 6,
  TGR_STATUS_INTERNAL = 99,
} TgrStatus;

typedef enum TgrDistanceMode {
  TGR_DISTANCE_MODE_MEAN = 0,
  TGR_DISTANCE_MODE_MIN = 1,
} TgrDistanceMode;

/**
 * Opaque tracker handle.
 */
typedef struct TgrTracker TgrTracker;

typedef struct TgrTrackerConfig {
  double tau;
  /**
   * Non-zero disables deletion; `age` is then ignored.
   */
  uint8_t age_infinite;
  uint32_t age;
  uint32_t gallery_size;
  enum TgrDistanceMode distance_mode;
  uint32_t n_init;
  uint8_t cascade;
} TgrTrackerConfig;

typedef struct TgrBox {
  double x;
  double y;
  double w;
  double h;
} TgrBox;

/**
 * One reported box of a track.
 */
typedef struct TgrOutputRow {
  uint32_t frame;
  uint64_t track_id;
  struct TgrBox bbox;
} TgrOutputRow;

/**
 * A ground-truth or predicted box for evaluation.
 */
typedef struct TgrLabeledBox {
  uint32_t frame;
  uint64_t id;
  struct TgrBox bbox;
} TgrLabeledBox;

typedef struct TgrMetrics {
  double mota;
  double motp;
  uint64_t idsw;
  uint64_t fp;
  uint64_t fn_;
  double idf1;
  double idp;
  double idr;
  double det_a;
  double ass_a;
  double ass_pr;
  double ass_re;
  double hota;
  double ass_a_prime;
  double tgrhota;
  /**
   * Non-zero when TP' was empty at some threshold with TP non-empty.
   */
  uint8_t tp_prime_degenerate;
} TgrMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *tgr_last_error_message(void);

/**
 * Fills `out` with the default configuration.
 *
 * # Safety
 * `out` must be null or point to writable memory for one config.
 */
enum TgrStatus tgr_tracker_config_default(struct TgrTrackerConfig *out);

/**
 * Creates a tracker. Descriptors passed to [`tgr_tracker_step`] are used
 * as given, so callers fuse whole-body and head-shoulder features first
 * (see [`tgr_fuse_embedding`]).
 *
 * # Safety
 * `config` must point to a valid config and `out` to writable memory for
 * one pointer.
 */
enum TgrStatus tgr_tracker_new(const struct TgrTrackerConfig *config, struct TgrTracker **out);

/**
 * Advances the tracker by one frame. `boxes` holds `count` reported boxes
 * and `descriptors` holds `count * dim` values, row-major. Frames must be
 * strictly increasing. The rows reported by this step (including rows
 * backfilled for newly confirmed tracks) are then available from
 * [`tgr_tracker_outputs`].
 *
 * # Safety
 * `tracker` must come from [`tgr_tracker_new`]; the arrays must hold the
 * stated number of elements.
 */
enum TgrStatus tgr_tracker_step(struct TgrTracker *tracker,
                                uint32_t frame,
                                const struct TgrBox *boxes,
                                const float *descriptors,
                                size_t count,
                                size_t dim);

/**
 * Copies the rows of the last step into `buf`. `*count` receives the
 * number of rows; when `capacity` is too small nothing is copied and
 * `TGR_STATUS_BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `tracker` must be valid, `count` writable, and `buf` valid for
 * `capacity` writes (it may be null when `capacity` is zero).
 */
enum TgrStatus tgr_tracker_outputs(const struct TgrTracker *tracker,
                                   struct TgrOutputRow *buf,
                                   size_t capacity,
                                   size_t *count);

/**
 * # Safety
 * `tracker` must be null or come from [`tgr_tracker_new`], and must not be
 * used afterwards.
 */
void tgr_tracker_free(struct TgrTracker *tracker);

/**
 * Builds the fused descriptor: each part L2-normalized, head-shoulder
 * block zero when `hs` is null. `out` receives `wb_dim + hs_dim` values.
 *
 * # Safety
 * `wb` must hold `wb_dim` values, `hs` null or `hs_dim` values, and `out`
 * room for `wb_dim + hs_dim` values.
 */
enum TgrStatus tgr_fuse_embedding(const float *wb,
                                  size_t wb_dim,
                                  const float *hs,
                                  size_t hs_dim,
                                  float *out);

/**
 * Minimum-cost assignment of a row-major `rows x cols` matrix.
 * `assignment[r]` receives the column of row `r`, or -1.
 *
 * # Safety
 * `cost` must hold `rows * cols` values, `assignment` room for `rows`
 * values, and `total` must be writable or null.
 */
enum TgrStatus tgr_solve_min_cost(const double *cost,
                                  size_t rows,
                                  size_t cols,
                                  int64_t *assignment,
                                  double *total);

/**
 * Computes all metric families over the localization grid
 * `loc_lo:loc_hi:loc_step` (0.05:0.95:0.05 is the usual choice).
 *
 * # Safety
 * `gt` and `pred` must hold `n_gt` and `n_pred` boxes; `out` must be
 * writable.
 */
enum TgrStatus tgr_evaluate(const struct TgrLabeledBox *gt,
                            size_t n_gt,
                            const struct TgrLabeledBox *pred,
                            size_t n_pred,
                            double loc_lo,
                            double loc_hi,
                            double loc_step,
                            struct TgrMetrics *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tgr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TGRMPT_H */
