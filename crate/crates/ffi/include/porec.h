#ifndef POREC_H
#define POREC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Tolerance on the parity deviation of floating-point strategies.
 */
#define POREC_PARITY_TOL 1e-8

typedef enum PorecStatus {
  POREC_STATUS_OK = 0,
  POREC_STATUS_NULL_POINTER = 1,
  POREC_STATUS_INVALID_ARGUMENT = 2,
  POREC_STATUS_PARSE = 3,
  POREC_STATUS_INVALID_STRATEGY = 4,
  POREC_STATUS_IO = 5,
  POREC_STATUS_OVERFLOW = 6,
  POREC_STATUS_PANIC = 7,
} PorecStatus;

typedef enum PorecTask {
  POREC_TASK_EXCLUSION = 0,
  POREC_TASK_RETRIEVAL = 1,
} PorecTask;

/**
 * Opaque strategy handle.
 */
typedef struct PorecStrategy PorecStrategy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null after a success.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *porec_last_error(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void porec_string_free(char *s);

/**
 * Noncontextual bound for `n` digits over `m` symbols.
 * `out_exact` may be null; otherwise it receives a "p/q" string.
 *
 * # Safety
 * `out_value` must be writable; `out_exact` must be null or writable.
 */
enum PorecStatus porec_noncontextual_bound(size_t n,
                                           uint32_t m,
                                           enum PorecTask task,
                                           double *out_value,
                                           char **out_exact);

/**
 * Exact classical optimum over parity-oblivious strategies with `k` messages.
 *
 * # Safety
 * Same pointer rules as [`porec_noncontextual_bound`].
 */
enum PorecStatus porec_classical_oracle(size_t n,
                                        uint32_t m,
                                        size_t k,
                                        enum PorecTask task,
                                        double *out_value,
                                        char **out_exact);

/**
 * Best success probability of projective qubit strategies for two digits.
 *
 * # Safety
 * `out_value` must be writable.
 */
enum PorecStatus porec_projective_qubit_bound(uint32_t m, double *out_value);

/**
 * Depolarizing weight at which `value` falls to the noncontextual bound.
 *
 * # Safety
 * `out_value` must be writable.
 */
enum PorecStatus porec_noise_threshold(double value, size_t n, uint32_t m, double *out_value);

/**
 * Parses a strategy document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum PorecStatus porec_strategy_from_json(const char *json, struct PorecStrategy **out);

/**
 * Loads a strategy file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PorecStatus porec_strategy_read(const char *path, struct PorecStrategy **out);

/**
 * The optimal qubit strategy for two trits.
 *
 * # Safety
 * `out` must be writable.
 */
enum PorecStatus porec_strategy_qubit_optimum(enum PorecTask task, struct PorecStrategy **out);

/**
 * Serializes a strategy. Release the result with [`porec_string_free`].
 *
 * # Safety
 * `s` must be a live handle; `out_json` must be writable.
 */
enum PorecStatus porec_strategy_to_json(const struct PorecStrategy *s, char **out_json);

/**
 * Success probability of the strategy on the task stored with it.
 *
 * # Safety
 * `s` must be a live handle; `out_value` must be writable.
 */
enum PorecStatus porec_strategy_success(const struct PorecStrategy *s, double *out_value);

/**
 * Largest parity deviation of the strategy's preparations.
 *
 * # Safety
 * `s` must be a live handle; `out_value` must be writable.
 */
enum PorecStatus porec_strategy_parity_deviation(const struct PorecStrategy *s, double *out_value);

/**
 * Whether the strategy is parity-oblivious and beats the noncontextual bound.
 *
 * # Safety
 * `s` must be a live handle; `out_certified` must be writable.
 */
enum PorecStatus porec_strategy_certifies_contextuality(const struct PorecStrategy *s,
                                                        bool *out_certified);

/**
 * Releases a strategy handle. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void porec_strategy_free(struct PorecStrategy *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POREC_H */
