#ifndef HHDL_H
#define HHDL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum HhdlStatus {
  HHDL_STATUS_OK = 0,
  HHDL_STATUS_NULL_POINTER = 1,
  HHDL_STATUS_DOMAIN = 2,
  HHDL_STATUS_DIMENSION_MISMATCH = 3,
  HHDL_STATUS_SYMMETRY_VIOLATION = 4,
  HHDL_STATUS_NOT_ORTHONORMAL = 5,
  HHDL_STATUS_DEGENERATE = 6,
  HHDL_STATUS_FORMAT = 7,
  HHDL_STATUS_UNSUPPORTED = 8,
  HHDL_STATUS_IO = 9,
  HHDL_STATUS_INVALID_UTF8 = 10,
  HHDL_STATUS_PANIC = 11,
} HhdlStatus;

typedef enum HhdlVariant {
  HHDL_VARIANT_QDLA = 0,
  HHDL_VARIANT_QHM = 1,
  HHDL_VARIANT_HM = 2,
} HhdlVariant;

/**
 * Opaque dictionary handle.
 */
typedef struct HhdlDictionary HhdlDictionary;

/**
 * Opaque training result handle.
 */
typedef struct HhdlTrainResult HhdlTrainResult;

/**
 * Training parameters. `m` is ignored for `HHDL_VARIANT_QDLA`.
 */
typedef struct HhdlTrainConfig {
  enum HhdlVariant variant;
  size_t m;
  size_t s;
  size_t iterations;
  uint64_t seed;
  /**
   * Visit reflectors in a seeded random order (hm only).
   */
  bool random_order;
  bool early_stop;
} HhdlTrainConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *hhdl_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hhdl_version(void);

/**
 * Builds a reflector dictionary from `m` unit vectors of length `n`, stored
 * column-major with `u_1` first. Zero vectors are identity reflectors.
 *
 * # Safety
 * `vectors` must hold `n*m` doubles; `out` must be writable.
 */
enum HhdlStatus hhdl_dictionary_from_reflectors(size_t n,
                                                size_t m,
                                                const double *vectors,
                                                bool orthogonal_set,
                                                struct HhdlDictionary **out);

/**
 * The built-in 64×64 separable DCT-II dictionary.
 *
 * # Safety
 * `out` must be writable.
 */
enum HhdlStatus hhdl_dictionary_dct(struct HhdlDictionary **out);

/**
 * Loads an HHDL or QDLA file; the name `dct` gives the built-in DCT.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum HhdlStatus hhdl_dictionary_load(const char *path, struct HhdlDictionary **out);

/**
 * # Safety
 * `d` must be a live handle and `path` a NUL-terminated string.
 */
enum HhdlStatus hhdl_dictionary_save(const struct HhdlDictionary *d, const char *path);

/**
 * Signal dimension `n`, or 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
size_t hhdl_dictionary_dim(const struct HhdlDictionary *d);

/**
 * Reflector count, or -1 for a dense dictionary or a null handle.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
ptrdiff_t hhdl_dictionary_reflector_count(const struct HhdlDictionary *d);

/**
 * `out = D x` for `cols` columns of length `n`. `out` may alias `x`.
 *
 * # Safety
 * `x` and `out` must hold `n*cols` doubles.
 */
enum HhdlStatus hhdl_dictionary_apply(const struct HhdlDictionary *d,
                                      const double *x,
                                      size_t cols,
                                      double *out);

/**
 * `out = Dᵀ y` for `cols` columns of length `n`. `out` may alias `y`.
 *
 * # Safety
 * `y` and `out` must hold `n*cols` doubles.
 */
enum HhdlStatus hhdl_dictionary_apply_adjoint(const struct HhdlDictionary *d,
                                              const double *y,
                                              size_t cols,
                                              double *out);

/**
 * Writes the dense `n × n` matrix of `d`, column-major.
 *
 * # Safety
 * `out` must hold `n*n` doubles.
 */
enum HhdlStatus hhdl_dictionary_to_dense(const struct HhdlDictionary *d, double *out);

/**
 * # Safety
 * `d` must be null or a handle not yet freed.
 */
void hhdl_dictionary_free(struct HhdlDictionary *d);

/**
 * Trains on `cols` signals of length `n`.
 *
 * # Safety
 * `y` must hold `n*cols` doubles; `config` must be valid; `out` writable.
 */
enum HhdlStatus hhdl_train(const double *y,
                           size_t n,
                           size_t cols,
                           const struct HhdlTrainConfig *config,
                           struct HhdlTrainResult **out);

/**
 * New handle holding a copy of the learned dictionary.
 *
 * # Safety
 * `r` must be a live result handle; `out` writable.
 */
enum HhdlStatus hhdl_train_result_dictionary(const struct HhdlTrainResult *r,
                                             struct HhdlDictionary **out);

/**
 * Number of recorded objectives (iterations run + 1), or 0 for null.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t hhdl_train_result_objective_count(const struct HhdlTrainResult *r);

/**
 * Copies up to `len` per-iteration objectives into `out` and returns the
 * number copied.
 *
 * # Safety
 * `out` must hold `len` doubles.
 */
size_t hhdl_train_result_objectives(const struct HhdlTrainResult *r, double *out, size_t len);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void hhdl_train_result_free(struct HhdlTrainResult *r);

/**
 * Codes `y` with `s`-sparse thresholding against `d` and writes
 * `‖Y − D X‖_F / √(n·cols)`.
 *
 * # Safety
 * `y` must hold `n*cols` doubles with `n` the dictionary dimension.
 */
enum HhdlStatus hhdl_rmse(const struct HhdlDictionary *d,
                          const double *y,
                          size_t cols,
                          size_t s,
                          double *out);

/**
 * `(2n − 1)n / (4nm)`; NaN when `m` is 0.
 */
double hhdl_speedup_qdla(uint64_t n, uint64_t m);

/**
 * # Safety
 * `out` must be writable.
 */
enum HhdlStatus hhdl_speedup_fct(uint64_t n, uint64_t m, double *out);

/**
 * `2sn² + 2s²n + 4sn + s³`.
 */
uint64_t hhdl_omp_cost(uint64_t n, uint64_t s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HHDL_H */
