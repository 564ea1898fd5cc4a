#ifndef REGRET_CAP_H
#define REGRET_CAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RcStatus {
  RC_STATUS_OK = 0,
  RC_STATUS_NULL_POINTER = 1,
  RC_STATUS_INVALID_ARGUMENT = 2,
  RC_STATUS_PARSE = 3,
  RC_STATUS_IO = 4,
  /**
   * The policy rejects every choice the firm could make in the market.
   */
  RC_STATUS_NO_FEASIBLE_CHOICE = 5,
  /**
   * The output buffer is shorter than the number of results; the count is still reported.
   */
  RC_STATUS_BUFFER_TOO_SMALL = 6,
  RC_STATUS_PANIC = 7,
} RcStatus;

typedef enum RcTie {
  RC_TIE_AGAINST_REGULATOR = 0,
  RC_TIE_FOR_REGULATOR = 1,
  RC_TIE_ALL = 2,
} RcTie;

typedef enum RcVerdict {
  RC_VERDICT_ATTAINS_OPTIMUM = 0,
  RC_VERDICT_SUBOPTIMAL = 1,
  RC_VERDICT_LOWER_BOUND_VIOLATED = 2,
} RcVerdict;

/**
 * Opaque market handle.
 */
typedef struct RcMarket RcMarket;

/**
 * Opaque policy handle.
 */
typedef struct RcPolicy RcPolicy;

typedef struct RcConstants {
  double alpha;
  double v_bar;
  double k_alpha;
  double r_alpha;
  double q_alpha;
  double s_alpha;
} RcConstants;

typedef struct RcOutcome {
  double q;
  double p;
  double revenue;
  double fp;
  double cs;
  double dstr;
  double rgrt;
  double opt;
} RcOutcome;

typedef struct RcCertification {
  double r_alpha;
  /**
   * Largest regret found on the extremal families.
   */
  double lower_bound;
  /**
   * Largest regret over the families and the random markets.
   */
  double upper_sweep;
  size_t scenarios;
  enum RcVerdict verdict;
} RcCertification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rc_version(void);

/**
 * Message for the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *rc_last_error(void);

/**
 * # Safety
 * `out_constants` must point to writable memory for one `RcConstants`.
 */
enum RcStatus rc_constants(double alpha, double v_bar, struct RcConstants *out_constants);

/**
 * Parses the `[market]` part of a scenario document.
 *
 * # Safety
 * `document` must be a NUL-terminated string; `out_market` must be writable.
 */
enum RcStatus rc_market_parse(const char *document, struct RcMarket **out_market);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out_market` must be writable.
 */
enum RcStatus rc_market_load(const char *path, struct RcMarket **out_market);

/**
 * # Safety
 * `market` must come from a market constructor and not have been freed. Null is ignored.
 */
void rc_market_free(struct RcMarket *market);

/**
 * Parses the `[policy]` part of a scenario document. Table files resolve
 * against the working directory.
 *
 * # Safety
 * `document` must be a NUL-terminated string; `out_policy` must be writable.
 */
enum RcStatus rc_policy_parse(const char *document, struct RcPolicy **out_policy);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out_policy` must be writable.
 */
enum RcStatus rc_policy_load(const char *path, struct RcPolicy **out_policy);

/**
 * The cap `k_alpha` with subsidy cap `s`; pass NaN for `s` to use `s_alpha`.
 *
 * # Safety
 * `out_policy` must be writable.
 */
enum RcStatus rc_policy_optimal(double alpha, double v_bar, double s, struct RcPolicy **out_policy);

/**
 * # Safety
 * `policy` must come from a policy constructor and not have been freed. Null is ignored.
 */
void rc_policy_free(struct RcPolicy *policy);

/**
 * Regret of `market` under `policy` when the firm breaks ties against the regulator.
 *
 * # Safety
 * Handles must be live; `out_regret` must be writable.
 */
enum RcStatus rc_policy_regret(const struct RcPolicy *policy,
                               const struct RcMarket *market,
                               double alpha,
                               double *out_regret);

/**
 * Writes up to `capacity` tied best responses into `buffer` in the order
 * `tie` asks for and stores the total number in `out_count`. `tie` must be one
 * of the `RcTie` values.
 *
 * # Safety
 * Handles must be live; `buffer` must hold `capacity` elements (it may be null
 * when `capacity` is 0); `out_count` must be writable.
 */
enum RcStatus rc_best_responses(const struct RcPolicy *policy,
                                const struct RcMarket *market,
                                double alpha,
                                enum RcTie tie,
                                struct RcOutcome *buffer,
                                size_t capacity,
                                size_t *out_count);

/**
 * Searches the adversarial library at `resolution` points per axis plus
 * `random_count` random markets drawn from `seed`.
 *
 * # Safety
 * `policy` must be live; `out_report` must be writable.
 */
enum RcStatus rc_certify(const struct RcPolicy *policy,
                         double alpha,
                         double v_bar,
                         size_t resolution,
                         size_t random_count,
                         uint64_t seed,
                         struct RcCertification *out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REGRET_CAP_H */
