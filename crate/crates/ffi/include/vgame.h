#ifndef VGAME_H
#define VGAME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every exported function.
 */
typedef enum VgStatus {
  VG_STATUS_OK = 0,
  VG_STATUS_NULL_POINTER = 1,
  VG_STATUS_INVALID_INPUT = 2,
  VG_STATUS_DIMENSION_MISMATCH = 3,
  VG_STATUS_UNSUPPORTED_DIMENSION = 4,
  VG_STATUS_FACILITY_COLLISION = 5,
  VG_STATUS_DEGENERATE = 6,
  VG_STATUS_OUT_OF_RANGE = 7,
  VG_STATUS_VERIFICATION = 8,
  /**
   * A value does not fit the C output type (for example a huge rational).
   */
  VG_STATUS_OVERFLOW = 9,
  VG_STATUS_PANIC = 10,
} VgStatus;

/**
 * Player 1 strategies reachable from C.
 */
typedef enum VgStrategy {
  VG_STRATEGY_CENTERPOINT = 0,
  VG_STRATEGY_MUSTAFA_RAY = 1,
  VG_STRATEGY_DISK_NET = 2,
  VG_STRATEGY_BALL_NET = 3,
} VgStrategy;

/**
 * Opaque table of ε̄ values for one dimension.
 */
typedef struct VgEpsilonTable VgEpsilonTable;

/**
 * Opaque set of users.
 */
typedef struct VgUserSet VgUserSet;

/**
 * Best response of Player 2. Unused coordinates are zero.
 */
typedef struct VgBestResponse {
  double location[3];
  size_t payoff;
} VgBestResponse;

/**
 * Summary of one played episode.
 */
typedef struct VgGameSummary {
  size_t n;
  /**
   * Facilities actually placed by Player 1.
   */
  size_t k;
  size_t p1_payoff;
  size_t p2_payoff;
  size_t halfcell_payoff;
  bool bounds_ok;
} VgGameSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *vg_last_error(void);

/**
 * Builds a user set from `count` points stored row by row.
 *
 * # Safety
 * `coords` must hold `count * dim` doubles and `out` must be writable.
 */
enum VgStatus vg_users_new(const double *coords,
                           size_t count,
                           size_t dim,
                           bool allow_degenerate,
                           struct VgUserSet **out);

/**
 * Number of users, or 0 for a null handle.
 *
 * # Safety
 * `users` must be null or a live handle.
 */
size_t vg_users_len(const struct VgUserSet *users);

/**
 * Releases a user set. Null is ignored.
 *
 * # Safety
 * `users` must be null or a handle not yet freed.
 */
void vg_users_free(struct VgUserSet *users);

/**
 * Builds the ε̄ table for dimension `dim` up to `kmax`.
 *
 * # Safety
 * `out` must be writable.
 */
enum VgStatus vg_table_new(size_t dim, int64_t kmax, struct VgEpsilonTable **out);

/**
 * Exact ε̄_k as a fraction.
 *
 * # Safety
 * `table` must be a live handle; `num` and `den` must be writable.
 */
enum VgStatus vg_table_value(const struct VgEpsilonTable *table,
                             size_t k,
                             int64_t *num,
                             int64_t *den);

/**
 * Exact approximation factor of the k-point recursive strategy.
 *
 * # Safety
 * `table` must be a live handle; `num` and `den` must be writable.
 */
enum VgStatus vg_table_factor(const struct VgEpsilonTable *table,
                              size_t k,
                              int64_t *num,
                              int64_t *den);

/**
 * Releases a table. Null is ignored.
 *
 * # Safety
 * `table` must be null or a handle not yet freed.
 */
void vg_table_free(struct VgEpsilonTable *table);

/**
 * Exact best response of Player 2 against `k` Player 1 facilities.
 *
 * # Safety
 * `f1` must hold `k * dim` doubles where `dim` is the user dimension,
 * `users` must be a live handle and `out` writable.
 */
enum VgStatus vg_best_response(const struct VgUserSet *users,
                               const double *f1,
                               size_t k,
                               struct VgBestResponse *out);

/**
 * Plays one episode. `epsilon_den == 0` means no ε is given, which the
 * net strategies then derive from `k`.
 *
 * # Safety
 * `users` must be a live handle and `out` writable.
 */
enum VgStatus vg_play(const struct VgUserSet *users,
                      size_t k,
                      enum VgStrategy strategy,
                      int64_t epsilon_num,
                      int64_t epsilon_den,
                      struct VgGameSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VGAME_H */
