#ifndef NEUROTOPO_H
#define NEUROTOPO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call. The input, numerical and configuration
// classes carry the same numbers as the command-line exit codes.
typedef enum NtStatus {
  NT_STATUS_OK = 0,
  NT_STATUS_INVALID_INPUT = 2,
  NT_STATUS_NUMERICAL = 3,
  NT_STATUS_CONFIG = 4,
  NT_STATUS_NULL_POINTER = 5,
  NT_STATUS_BUFFER_TOO_SMALL = 6,
  NT_STATUS_PANIC = 7,
} NtStatus;

typedef enum NtNullMode {
  NT_NULL_MODE_ETA = 0,
  NT_NULL_MODE_THETA = 1,
} NtNullMode;

// A binary code: samples by neurons.
typedef struct NtCode NtCode;

// A JSON report produced by [`nt_analyze`] or [`nt_test_feature`].
typedef struct NtReport NtReport;

// Options shared by the analysis and test calls. Start from
// [`nt_options_default`] and change what you need.
typedef struct NtOptions {
  double alpha;
  double smoothing;
  uint64_t seed;
  // One of the [`NtNullMode`] values.
  uint32_t null_mode;
  // Complex dimension; holes are tested below it.
  size_t max_dim;
  // Highest monomial order built from disjoint pairs.
  size_t max_order;
  // Include stage timings in analysis reports.
  bool timings;
} NtOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the library as a static NUL-terminated string.
const char *nt_version(void);

// Message of the last failed call on this thread, or null after a
// successful one. Valid until the next call into the library on the same
// thread.
const char *nt_last_error_message(void);

struct NtOptions nt_options_default(void);

// Builds a code from `n_samples * n_neurons` bytes in row-major order,
// each 0 or 1.
//
// # Safety
// `bits` must point to that many readable bytes and `out` must be a valid
// place to store the new handle.
enum NtStatus nt_code_from_bits(size_t n_neurons,
                                size_t n_samples,
                                const uint8_t *bits,
                                struct NtCode **out);

// Builds a code from real activations in row-major order, thresholding
// each neuron at its mean.
//
// # Safety
// `values` must point to `n_samples * n_neurons` readable doubles and
// `out` must be a valid place to store the new handle.
enum NtStatus nt_code_from_activations(size_t n_neurons,
                                       size_t n_samples,
                                       const double *values,
                                       struct NtCode **out);

// Reads a headerless CSV of 0/1 entries, or of activations when
// `binarize` is true.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid place to store
// the new handle.
enum NtStatus nt_code_load_csv(const char *path, bool binarize, struct NtCode **out);

// # Safety
// `code` must be null or a handle not yet freed.
void nt_code_free(struct NtCode *code);

// Number of neurons and of samples (rows) in the code.
//
// # Safety
// `code` must be a live handle; the output pointers may be null.
enum NtStatus nt_code_shape(const struct NtCode *code, size_t *n_neurons, size_t *n_samples);

// Betti numbers `β_0 .. β_{max_dim-1}` of the code's complex. `len`
// receives the count; when `capacity` is too small nothing is written to
// `out` and the call returns `BufferTooSmall`.
//
// # Safety
// `code` must be a live handle, `out` must hold `capacity` values and
// `len` must be valid.
enum NtStatus nt_betti(const struct NtCode *code,
                       size_t max_dim,
                       size_t *out,
                       size_t capacity,
                       size_t *len);

// Number of significant `m`-dimensional holes after the hole test.
//
// # Safety
// `code` must be a live handle, `opts` null or valid, `holes` valid.
enum NtStatus nt_test_hole(const struct NtCode *code,
                           size_t m,
                           const struct NtOptions *opts,
                           size_t *holes);

// Full analysis of a code as a JSON report.
//
// # Safety
// `code` must be a live handle, `opts` null or valid, `out` a valid place
// to store the new report.
enum NtStatus nt_analyze(const struct NtCode *code,
                         const struct NtOptions *opts,
                         struct NtReport **out);

// Tests one feature, written as on the command line: `"monomial i j"`,
// `"mixed i j"` or `"hole m"`.
//
// # Safety
// `code` must be a live handle, `feature` NUL-terminated, `opts` null or
// valid, `out` a valid place to store the new report.
enum NtStatus nt_test_feature(const struct NtCode *code,
                              const char *feature,
                              const struct NtOptions *opts,
                              struct NtReport **out);

// The report as NUL-terminated JSON, owned by the report.
//
// # Safety
// `report` must be null or a live handle.
const char *nt_report_json(const struct NtReport *report);

// Whether the tested feature was significant; for an analysis, whether
// any hole was.
//
// # Safety
// `report` must be null or a live handle.
bool nt_report_significant(const struct NtReport *report);

// # Safety
// `report` must be null or a handle not yet freed.
void nt_report_free(struct NtReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEUROTOPO_H */
