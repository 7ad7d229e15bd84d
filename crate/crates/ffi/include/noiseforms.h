#ifndef NOISEFORMS_H
#define NOISEFORMS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Zero is success.
 */
typedef enum NfStatus {
  NF_STATUS_OK = 0,
  NF_STATUS_NULL_POINTER = 1,
  NF_STATUS_DIMENSION = 2,
  NF_STATUS_VALIDATION = 3,
  NF_STATUS_NOT_CP = 4,
  NF_STATUS_NOT_TP = 5,
  NF_STATUS_PATTERN = 6,
  NF_STATUS_INFEASIBLE = 7,
  NF_STATUS_JSON = 8,
  NF_STATUS_UTF8 = 9,
  NF_STATUS_PANIC = 10,
} NfStatus;

/**
 * Opaque channel handle.
 */
typedef struct NfChannel NfChannel;

/**
 * Opaque Lindblad generator handle.
 */
typedef struct NfGenerator NfGenerator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success. Owned by the library.
 */
const char *nf_last_error(void);

/**
 * Static name of a status code.
 */
const char *nf_status_name(enum NfStatus status);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void nf_string_free(char *s);

/**
 * Parses a channel from its JSON form `{"in_dims","out_dims","choi_re","choi_im"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NfStatus nf_channel_from_json(const char *json, struct NfChannel **out);

/**
 * Builds a channel from row-major real and imaginary parts of its (d_in·d_out)² Choi matrix.
 *
 * # Safety
 * `re` and `im` must hold `(Π in_dims · Π out_dims)²` doubles; dims arrays their stated lengths.
 */
enum NfStatus nf_channel_from_parts(const double *re,
                                    const double *im,
                                    const size_t *in_dims,
                                    size_t n_in,
                                    const size_t *out_dims,
                                    size_t n_out,
                                    struct NfChannel **out);

/**
 * # Safety
 * `h` must be null or a handle from this library, not yet freed.
 */
void nf_channel_free(struct NfChannel *h);

/**
 * JSON form of a channel with 17 significant digits; free with [`nf_string_free`].
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum NfStatus nf_channel_to_json(const struct NfChannel *h, char **out);

/**
 * Total input and output dimensions.
 *
 * # Safety
 * `h` must be a live handle; `d_in` and `d_out` valid pointers.
 */
enum NfStatus nf_channel_dims(const struct NfChannel *h, size_t *d_in, size_t *d_out);

/**
 * Copies the Choi matrix (row-major) into caller buffers of `len` doubles each.
 *
 * # Safety
 * `re` and `im` must hold at least `len` doubles.
 */
enum NfStatus nf_channel_matrix(const struct NfChannel *h, double *re, double *im, size_t len);

/**
 * Complete positivity and trace preservation at the library tolerances.
 *
 * # Safety
 * `h` must be a live handle; `cp` and `tp` valid pointers.
 */
enum NfStatus nf_channel_validate(const struct NfChannel *h, bool *cp, bool *tp);

/**
 * Fidelity ⟨Φ|E|Φ⟩ with the identity channel.
 *
 * # Safety
 * `h` must be a live handle and `f` a valid pointer.
 */
enum NfStatus nf_channel_fidelity_identity(const struct NfChannel *h, double *f);

/**
 * Trace distance ½‖E − F‖₁ between two Choi states.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` a valid pointer.
 */
enum NfStatus nf_trace_distance(const struct NfChannel *a, const struct NfChannel *b, double *out);

/**
 * Twirls over a built-in set: `pauli`, `depolarizing`, `phase-gate`, `cnot`, `swap`.
 *
 * # Safety
 * `h` must be a live handle, `set` a NUL-terminated string and `out` a valid pointer.
 */
enum NfStatus nf_twirl(const struct NfChannel *h, const char *set, struct NfChannel **out);

/**
 * Sacrifices fidelity until the output is ideal gate plus global white noise.
 * `gate` is `identity`, `swap`, `cnot` or `phase`; `alpha` is read only for `phase`.
 *
 * # Safety
 * `h` must be a live handle, `gate` a NUL-terminated string; `out` and `fidelity` valid pointers.
 */
enum NfStatus nf_sacrifice(const struct NfChannel *h,
                           const char *gate,
                           double alpha,
                           struct NfChannel **out,
                           double *fidelity);

/**
 * Parses a generator from `{"H_re","H_im","Hl_re","Hl_im","gks_re","gks_im","basis"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NfStatus nf_generator_from_json(const char *json, struct NfGenerator **out);

/**
 * # Safety
 * `g` must be null or a handle from this library, not yet freed.
 */
void nf_generator_free(struct NfGenerator *g);

/**
 * Channel e^{𝒵t}.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum NfStatus nf_generator_evolve(const struct NfGenerator *g, double t, struct NfChannel **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NOISEFORMS_H */
