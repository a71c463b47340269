#ifndef SMDG_H
#define SMDG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of the C interface.
typedef enum SmdgStatus {
  SMDG_STATUS_OK = 0,
  SMDG_STATUS_NULL_POINTER = 1,
  SMDG_STATUS_INVALID_UTF8 = 2,
  SMDG_STATUS_CONFIG = 3,
  SMDG_STATUS_WELL_POSEDNESS = 4,
  SMDG_STATUS_STRUCTURAL = 5,
  SMDG_STATUS_DIVERGENCE = 6,
  SMDG_STATUS_UNSUPPORTED_SCHEME = 7,
  SMDG_STATUS_IO = 8,
  SMDG_STATUS_BUFFER_TOO_SMALL = 9,
  SMDG_STATUS_PANIC = 10,
  SMDG_STATUS_INTERNAL = 11,
} SmdgStatus;

// Opaque experiment handle.
typedef struct SmdgExperiment SmdgExperiment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *smdg_version(void);

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *smdg_last_error_message(void);

// Build an experiment from a flat JSON config. On success `*out` owns a
// handle that must be released with `smdg_experiment_free`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum SmdgStatus smdg_experiment_from_json(const char *json, struct SmdgExperiment **out);

// Release a handle. NULL is ignored.
//
// # Safety
// `h` must come from `smdg_experiment_from_json` and not be freed twice.
void smdg_experiment_free(struct SmdgExperiment *h);

// Number of error fields reported per sample (2 in 1D, 3 in 2D).
//
// # Safety
// `h` must be a live handle and `out` a valid pointer.
enum SmdgStatus smdg_experiment_num_fields(const struct SmdgExperiment *h, uintptr_t *out);

// Run one seeded sample. Writes the per-field L2 errors at the final time
// into `errors` and, if `energy` is not NULL, the final discrete energy.
//
// # Safety
// `errors` must point to `len` writable doubles.
enum SmdgStatus smdg_experiment_run_sample(const struct SmdgExperiment *h,
                                           uintptr_t index,
                                           double *errors,
                                           uintptr_t len,
                                           double *energy);

// Monte Carlo over the configured sample count. Writes per-field RMS errors
// into `rms` and, if not NULL, their bootstrap standard errors into `se`.
//
// # Safety
// `rms` (and `se` when given) must point to `len` writable doubles.
enum SmdgStatus smdg_experiment_monte_carlo(const struct SmdgExperiment *h,
                                            double *rms,
                                            double *se,
                                            uintptr_t len);

// Run the refinement ladder of a JSON config and return the CSV table in
// `*out`, to be released with `smdg_string_free`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum SmdgStatus smdg_convergence_csv(const char *json, char **out);

// Release a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void smdg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SMDG_H */
