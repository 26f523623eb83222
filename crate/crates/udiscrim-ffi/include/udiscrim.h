#ifndef UDISCRIM_H
#define UDISCRIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum UdStatus {
  /**
   * Success.
   */
  UdOk = 0,
  /**
   * A required pointer was null.
   */
  UdNullPointer = 1,
  /**
   * Invalid input: parse failure, dimension mismatch, non-unitary matrix.
   */
  UdInvalidInput = 2,
  /**
   * The requested strategy does not apply to these gates.
   */
  UdStrategyInapplicable = 3,
  /**
   * Internal numerical failure.
   */
  UdInternalError = 4,
} UdStatus;

/**
 * Opaque unitary gate handle.
 */
typedef struct UdGate UdGate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *ud_version(void);

/**
 * Parses a gate from JSON (`{"dims": [...], "matrix": [[re, im], ...]}`).
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum UdStatus ud_gate_parse_json(const char *json, struct UdGate **out);

/**
 * Builds a gate from interleaved re/im entries, row-major, with one local
 * dimension per party.
 *
 * # Safety
 * `entries` must hold `2·D²` doubles and `dims` `n_parties` entries, where
 * `D` is the product of the dims.
 */
enum UdStatus ud_gate_new(const double *entries,
                          const uintptr_t *dims,
                          uintptr_t n_parties,
                          struct UdGate **out);

/**
 * Total Hilbert-space dimension of a gate.
 *
 * # Safety
 * `gate` must be a live handle from this library.
 */
uintptr_t ud_gate_dim(const struct UdGate *gate);

/**
 * Serialises a gate back to its JSON file format.
 *
 * # Safety
 * `gate` must be live; free the string with `ud_string_free`.
 */
enum UdStatus ud_gate_to_json(const struct UdGate *gate, char **out_json);

/**
 * Frees a gate handle.
 *
 * # Safety
 * `gate` must come from this library and not be freed twice.
 */
void ud_gate_free(struct UdGate *gate);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ud_string_free(char *s);

/**
 * Classifies a gate (Product, ProductSwap, PartitionPrimitive or
 * Imprimitive); the result is a JSON object.
 *
 * # Safety
 * `gate` must be live and `out_json` valid; free the string with
 * `ud_string_free`.
 */
enum UdStatus ud_classify_json(const struct UdGate *gate, char **out_json);

/**
 * Minimal parallel run count for discriminating two gates, optionally on
 * the `U ⊕ I_k` ancilla extension. JSON result with `n_runs` (null when
 * not distinguishable), `delta` and the `⌈π/δ⌉` cross-check.
 *
 * # Safety
 * Both gates must be live handles and `out_json` valid.
 */
enum UdStatus ud_min_runs_json(const struct UdGate *u,
                               const struct UdGate *v,
                               uintptr_t embed_levels,
                               uintptr_t max_n,
                               char **out_json);

/**
 * Canonical two-qubit decomposition: global phase, interaction vector and
 * reconstruction residual as JSON.
 *
 * # Safety
 * `gate` must be live and `out_json` valid.
 */
enum UdStatus ud_kak_json(const struct UdGate *gate, char **out_json);

/**
 * Lie-closure dimension and matched partition as JSON.
 *
 * # Safety
 * `gate` must be live and `out_json` valid.
 */
enum UdStatus ud_lie_closure_json(const struct UdGate *gate, char **out_json);

/**
 * Runs one seeded LOCC discrimination trial against a hidden-gate oracle.
 * Strategies: 0 Jamiolkowski single run, 1 parallel-N, 2 two-qubit
 * pipeline, 3 elimination over M hypotheses. JSON verdict plus the
 * line-oriented transcript.
 *
 * # Safety
 * `gates` must point to `n_gates` live handles and `out_json` be valid.
 */
enum UdStatus ud_simulate_json(const struct UdGate *const *gates,
                               uintptr_t n_gates,
                               uint32_t strategy,
                               uint64_t seed,
                               char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UDISCRIM_H */
