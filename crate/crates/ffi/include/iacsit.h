#ifndef IACSIT_H
#define IACSIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IacsitClassification {
  IACSIT_CLASSIFICATION_INFEASIBLE = 0,
  IACSIT_CLASSIFICATION_TIGHT = 1,
  IACSIT_CLASSIFICATION_SUPER = 2,
} IacsitClassification;

typedef enum IacsitRemovalMode {
  IACSIT_REMOVAL_MODE_HEURISTIC = 0,
  IACSIT_REMOVAL_MODE_EXHAUSTIVE = 1,
} IacsitRemovalMode;

// Result code of every fallible call.
typedef enum IacsitStatus {
  IACSIT_STATUS_OK = 0,
  IACSIT_STATUS_NULL_POINTER = 1,
  IACSIT_STATUS_INVALID_UTF8 = 2,
  IACSIT_STATUS_PARSE = 3,
  IACSIT_STATUS_INVALID_ARGUMENT = 4,
  // The configuration is infeasible for the requested operation.
  IACSIT_STATUS_INFEASIBLE = 5,
  // Guard or invariant failure inside the library.
  IACSIT_STATUS_INTERNAL = 6,
  // A panic was caught at the boundary.
  IACSIT_STATUS_PANIC = 7,
} IacsitStatus;

// CSIT allocation together with its antenna-removal plan.
typedef struct IacsitAllocation IacsitAllocation;

// Parsed antenna configuration.
typedef struct IacsitConfig IacsitConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *iacsit_last_error(void);

// Library version and RNG identifier as a static string.
const char *iacsit_version(void);

// Parses `[(N,M).(N,M)...]` notation, with `^k` repetition.
//
// # Safety
// `text` must be a nul-terminated string; `out` must be writable.
enum IacsitStatus iacsit_config_parse(const char *text, struct IacsitConfig **out);

// # Safety
// `config` must come from [`iacsit_config_parse`] or be null.
void iacsit_config_free(struct IacsitConfig *config);

// # Safety
// `config` must be a live handle; `out` must be writable.
enum IacsitStatus iacsit_config_users(const struct IacsitConfig *config, size_t *out);

// Classifies the configuration with the polynomial tester.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum IacsitStatus iacsit_feasibility(const struct IacsitConfig *config,
                                     enum IacsitClassification *out);

// Number of cross-link coefficients shared under complete CSIT.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum IacsitStatus iacsit_complete_size(const struct IacsitConfig *config, size_t *out);

// Computes the incomplete CSIT allocation of a feasible configuration,
// removing antennas first when it is super-feasible. `mode` is an
// [`IacsitRemovalMode`] value.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum IacsitStatus iacsit_allocate(const struct IacsitConfig *config,
                                  uint32_t mode,
                                  struct IacsitAllocation **out);

// # Safety
// `alloc` must come from [`iacsit_allocate`] or be null.
void iacsit_allocation_free(struct IacsitAllocation *alloc);

// Number of coefficients the allocation shares.
//
// # Safety
// `alloc` must be a live handle; `out` must be writable.
enum IacsitStatus iacsit_allocation_size(const struct IacsitAllocation *alloc, size_t *out);

// Mask of transmitter `tx` (0-based) as bitsets over users: bit `i` of
// `rx_set` is receiver `i`. `complete` is set for a full-CSIT mask, in
// which case both sets cover every user.
//
// # Safety
// `alloc` must be a live handle; the out-pointers must be writable.
enum IacsitStatus iacsit_allocation_mask(const struct IacsitAllocation *alloc,
                                         size_t tx,
                                         uint32_t *rx_set,
                                         uint32_t *tx_set,
                                         bool *complete);

// The allocation report as JSON, identical to `iacsit allocate --json`.
//
// # Safety
// `alloc` must be a live handle; `out` must be writable.
enum IacsitStatus iacsit_allocation_to_json(const struct IacsitAllocation *alloc, char **out);

// Draws the channel from `seed`, runs distributed precoding under the
// allocation and returns the result as JSON (the `iacsit precode --json`
// document). Pass `tolerance <= 0` or `max_iterations == 0` for defaults.
//
// # Safety
// `alloc` must be a live handle; `out` must be writable.
enum IacsitStatus iacsit_precode_json(const struct IacsitAllocation *alloc,
                                      uint64_t seed,
                                      double tolerance,
                                      uint32_t max_iterations,
                                      char **out);

// # Safety
// `s` must come from this library or be null.
void iacsit_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IACSIT_H */
