#ifndef EFG_CYCLIC_H
#define EFG_CYCLIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EfgAlgorithm {
  EFG_ALGORITHM_ECYCLICPDA = 0,
  EFG_ALGORITHM_MIRROR_PROX = 1,
  EFG_ALGORITHM_CFR_PLUS = 2,
  EFG_ALGORITHM_PCFR_PLUS = 3,
} EfgAlgorithm;

typedef enum EfgAveraging {
  /**
   * The algorithm's own default.
   */
  EFG_AVERAGING_DEFAULT = 0,
  EFG_AVERAGING_UNIFORM = 1,
  EFG_AVERAGING_LINEAR = 2,
  EFG_AVERAGING_QUADRATIC = 3,
} EfgAveraging;

typedef enum EfgBlocks {
  EFG_BLOCKS_SINGLE = 0,
  EFG_BLOCKS_INFOSETS = 1,
  EFG_BLOCKS_CHILDREN = 2,
  EFG_BLOCKS_POSTORDER = 3,
} EfgBlocks;

typedef enum EfgRegularizer {
  EFG_REGULARIZER_ENTROPY = 0,
  EFG_REGULARIZER_EUCLIDEAN = 1,
} EfgRegularizer;

typedef enum EfgStatus {
  EFG_STATUS_OK = 0,
  EFG_STATUS_NULL_POINTER = 1,
  EFG_STATUS_CONFIG = 2,
  EFG_STATUS_NUMERICAL = 3,
  EFG_STATUS_IO = 4,
  EFG_STATUS_UNKNOWN_GAME = 5,
  EFG_STATUS_FORMAT = 6,
  EFG_STATUS_INFEASIBLE = 7,
  EFG_STATUS_INVALID_UTF8 = 8,
  EFG_STATUS_OUT_OF_RANGE = 9,
  EFG_STATUS_PANIC = 10,
} EfgStatus;

/**
 * Opaque game handle.
 */
typedef struct EfgGame EfgGame;

/**
 * Opaque solver trace handle.
 */
typedef struct EfgTrace EfgTrace;

/**
 * Solver configuration; fill with [`efg_config_default`] first.
 */
typedef struct EfgSolveConfig {
  /**
   * An `EfgAlgorithm` value.
   */
  uint32_t algorithm;
  /**
   * An `EfgRegularizer` value.
   */
  uint32_t regularizer;
  /**
   * An `EfgAveraging` value.
   */
  uint32_t averaging;
  /**
   * An `EfgBlocks` value.
   */
  uint32_t blocks;
  /**
   * Stepsize multiplier `2^multiplier_exp`.
   */
  int32_t multiplier_exp;
  /**
   * Gradient computations.
   */
  uint64_t budget;
  /**
   * Gradient computations between checkpoints; 0 picks by game size.
   */
  uint64_t cadence;
  /**
   * Restart fraction in (0, 1); 0 disables restarts.
   */
  double restart_beta;
  /**
   * Nonzero: start from a random interior point drawn from `seed`.
   */
  uint8_t use_seed;
  uint64_t seed;
} EfgSolveConfig;

typedef struct EfgCheckpoint {
  uint64_t grad_computations;
  double duality_gap;
  double wall_ms;
  uint8_t restarted;
} EfgCheckpoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *efg_last_error_message(void);

/**
 * Defaults: ECyclicPDA, entropy, algorithm averaging, single block,
 * multiplier 1, budget 10000, size-based cadence, no restarts, uniform start.
 */
struct EfgSolveConfig efg_config_default(void);

/**
 * Generates a named benchmark game into `*out`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum EfgStatus efg_game_generate(const char *name, struct EfgGame **out);

/**
 * Loads an EFG-SF v1 file into `*out`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum EfgStatus efg_game_load(const char *path, struct EfgGame **out);

/**
 * Writes `game` as EFG-SF v1.
 *
 * # Safety
 * `game` must come from this library and `path` be NUL-terminated.
 */
enum EfgStatus efg_game_save(const struct EfgGame *game, const char *path);

/**
 * Releases a game; null is ignored.
 *
 * # Safety
 * `game` must come from this library and not be used afterwards.
 */
void efg_game_free(struct EfgGame *game);

/**
 * Sequence counts of both players and the payoff nonzero count.
 *
 * # Safety
 * `game` must come from this library; the out pointers must be valid.
 */
enum EfgStatus efg_game_dims(const struct EfgGame *game, size_t *n_x, size_t *n_y, size_t *nnz);

/**
 * Runs a solver and stores the trace in `*out`.
 *
 * # Safety
 * `game` must come from this library; `config` and `out` must be valid.
 */
enum EfgStatus efg_solve(const struct EfgGame *game,
                         const struct EfgSolveConfig *config,
                         struct EfgTrace **out);

/**
 * Releases a trace; null is ignored.
 *
 * # Safety
 * `trace` must come from this library and not be used afterwards.
 */
void efg_trace_free(struct EfgTrace *trace);

/**
 * Number of checkpoints.
 *
 * # Safety
 * `trace` must come from this library; `out` must be valid.
 */
enum EfgStatus efg_trace_len(const struct EfgTrace *trace, size_t *out);

/**
 * Checkpoint `index`.
 *
 * # Safety
 * `trace` must come from this library; `out` must be valid.
 */
enum EfgStatus efg_trace_checkpoint(const struct EfgTrace *trace,
                                    size_t index,
                                    struct EfgCheckpoint *out);

/**
 * Copies the final average of `player` (0 for x, 1 for y) into `buf`, which
 * must hold exactly that player's sequence count.
 *
 * # Safety
 * `trace` must come from this library; `buf` must have room for `len` doubles.
 */
enum EfgStatus efg_trace_average(const struct EfgTrace *trace,
                                 uint32_t player,
                                 double *buf,
                                 size_t len);

/**
 * Duality gap of the sequence-form pair `(x, y)`.
 *
 * # Safety
 * `game` must come from this library; `x` and `y` must hold `n_x` and `n_y`
 * doubles; `out` must be valid.
 */
enum EfgStatus efg_duality_gap(const struct EfgGame *game,
                               const double *x,
                               size_t n_x,
                               const double *y,
                               size_t n_y,
                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EFG_CYCLIC_H */
