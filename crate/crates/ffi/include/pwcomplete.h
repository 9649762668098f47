#ifndef PWCOMPLETE_H
#define PWCOMPLETE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum PwcStatus {
  PWC_STATUS_OK = 0,
  PWC_STATUS_NULL_POINTER = 1,
  PWC_STATUS_INVALID_ARGUMENT = 2,
  PWC_STATUS_INVALID_WAVENUMBER = 3,
  PWC_STATUS_SIZE_MISMATCH = 4,
  PWC_STATUS_DEGENERATE_SURFACE = 5,
  PWC_STATUS_UNSUPPORTED_SURFACE = 6,
  PWC_STATUS_DOMAIN = 7,
  PWC_STATUS_ILL_POSED = 8,
  PWC_STATUS_BRACKET = 9,
  PWC_STATUS_INCONCLUSIVE = 10,
  PWC_STATUS_NUMERICAL = 11,
  PWC_STATUS_IO = 12,
  PWC_STATUS_JSON = 13,
  PWC_STATUS_BUFFER_TOO_SMALL = 14,
  PWC_STATUS_PANIC = 15,
} PwcStatus;

/**
 * Quadrature grid on the sphere of directions.
 */
typedef struct PwcDirections PwcDirections;

/**
 * Surface quadrature grid.
 */
typedef struct PwcSurface PwcSurface;

/**
 * Sampled indicator and resolved dips of a sweep.
 */
typedef struct PwcSweep PwcSweep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `capacity`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `capacity` writable bytes.
 */
size_t pwc_last_error_message(char *buf, size_t capacity);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pwc_version(void);

/**
 * Spherical Bessel function `j_l(x)`.
 *
 * # Safety
 * `result` must be a valid pointer.
 */
enum PwcStatus pwc_sph_bessel_j(size_t l, double x, double *result);

/**
 * Sphere of radius `radius` with an `n_theta × n_phi` product grid.
 *
 * # Safety
 * `surface` must be a valid pointer; on success it receives a handle owned
 * by the caller.
 */
enum PwcStatus pwc_sphere_new(double radius,
                              size_t n_theta,
                              size_t n_phi,
                              struct PwcSurface **surface);

/**
 * Star surface `r = R0 (1 + Σ eps_i Re Y_{l_i m_i})` with `n_terms` terms.
 *
 * # Safety
 * `l`, `m` and `eps` must each point to `n_terms` values (or be null when
 * `n_terms` is 0); `surface` must be a valid pointer.
 */
enum PwcStatus pwc_star_new(double base_radius,
                            const size_t *l,
                            const int64_t *m,
                            const double *eps,
                            size_t n_terms,
                            size_t n_theta,
                            size_t n_phi,
                            struct PwcSurface **surface);

/**
 * # Safety
 * `surface` must be null or a handle from a `*_new` call, freed once.
 */
void pwc_surface_free(struct PwcSurface *surface);

/**
 * Number of quadrature nodes, or 0 for a null handle.
 *
 * # Safety
 * `surface` must be null or a live handle.
 */
size_t pwc_surface_len(const struct PwcSurface *surface);

/**
 * Copy node coordinates (`3 · len` values, xyz interleaved) and area
 * weights (`len` values). Either output may be null.
 *
 * # Safety
 * `surface` must be a live handle; non-null outputs must hold `capacity`
 * nodes' worth of values.
 */
enum PwcStatus pwc_surface_nodes(const struct PwcSurface *surface,
                                 double *xyz,
                                 double *weights,
                                 size_t capacity);

/**
 * Gauss–Legendre × trapezoid grid of directions.
 *
 * # Safety
 * `dirs` must be a valid pointer.
 */
enum PwcStatus pwc_directions_new(size_t n_theta, size_t n_phi, struct PwcDirections **dirs);

/**
 * # Safety
 * `dirs` must be null or a handle from [`pwc_directions_new`], freed once.
 */
void pwc_directions_free(struct PwcDirections *dirs);

/**
 * # Safety
 * `dirs` must be null or a live handle.
 */
size_t pwc_directions_len(const struct PwcDirections *dirs);

/**
 * Dirichlet eigenvalues `k ≤ k_max` of the ball, ascending, with their
 * multiplicities. `count` receives the total even when `capacity` is too
 * small (status `BufferTooSmall`).
 *
 * # Safety
 * `ks` and `multiplicities` must hold `capacity` values; `count` must be
 * valid.
 */
enum PwcStatus pwc_ball_eigs(double radius,
                             double k_max,
                             double *ks,
                             size_t *multiplicities,
                             size_t capacity,
                             size_t *count);

/**
 * Subspace completeness indicator at `k`, in `[0, 1]`. An
 * `interior_count` of 0 selects the default count.
 *
 * # Safety
 * Handles must be live; `result` must be valid.
 */
enum PwcStatus pwc_completeness_indicator(double k,
                                          const struct PwcSurface *surface,
                                          const struct PwcDirections *dirs,
                                          size_t interior_count,
                                          uint64_t seed,
                                          double *result);

/**
 * Relative residual and density norm of fitting `Y_lm` by plane-wave
 * traces at `k`. A NaN `ridge` selects the default.
 *
 * # Safety
 * Handles must be live; outputs must be valid (either may be null).
 */
enum PwcStatus pwc_fit_harmonic(double k,
                                const struct PwcSurface *surface,
                                const struct PwcDirections *dirs,
                                size_t l,
                                int64_t m,
                                double ridge,
                                double *residual,
                                double *density_norm);

/**
 * Subspace-indicator sweep of `n_samples` points over `[k_lo, k_hi]` with
 * dip refinement. `threads` of 0 means 1.
 *
 * # Safety
 * Handles must be live; `sweep` must be valid and receives an owned handle.
 */
enum PwcStatus pwc_sweep_new(const struct PwcSurface *surface,
                             const struct PwcDirections *dirs,
                             double k_lo,
                             double k_hi,
                             size_t n_samples,
                             size_t interior_count,
                             uint64_t seed,
                             size_t threads,
                             struct PwcSweep **sweep);

/**
 * Sweep of the single-layer operator's smallest singular value.
 *
 * # Safety
 * `surface` must be live; `sweep` must be valid and receives an owned
 * handle.
 */
enum PwcStatus pwc_single_layer_sweep_new(const struct PwcSurface *surface,
                                          double k_lo,
                                          double k_hi,
                                          size_t n_samples,
                                          size_t threads,
                                          struct PwcSweep **sweep);

/**
 * # Safety
 * `sweep` must be null or a handle from a sweep constructor, freed once.
 */
void pwc_sweep_free(struct PwcSweep *sweep);

/**
 * Number of resolved dips, or 0 for a null handle.
 *
 * # Safety
 * `sweep` must be null or a live handle.
 */
size_t pwc_sweep_dip_count(const struct PwcSweep *sweep);

/**
 * Refined location, indicator minimum and multiplicity of dip `index`.
 *
 * # Safety
 * `sweep` must be live; outputs must be valid (any may be null).
 */
enum PwcStatus pwc_sweep_dip(const struct PwcSweep *sweep,
                             size_t index,
                             double *k,
                             double *indicator,
                             size_t *multiplicity);

/**
 * Copy the sampled `k` values and indicator values (`len` each).
 *
 * # Safety
 * `sweep` must be live; non-null outputs must hold `capacity` values;
 * `len` must be valid.
 */
enum PwcStatus pwc_sweep_samples(const struct PwcSweep *sweep,
                                 double *k,
                                 double *indicator,
                                 size_t capacity,
                                 size_t *len);

/**
 * Serialize the sweep as JSON into `buf` (NUL-terminated). `needed`
 * receives the byte length without the NUL, also on `BufferTooSmall`.
 *
 * # Safety
 * `sweep` must be live; `buf` must hold `capacity` bytes; `needed` must be
 * valid.
 */
enum PwcStatus pwc_sweep_to_json(const struct PwcSweep *sweep,
                                 char *buf,
                                 size_t capacity,
                                 size_t *needed);

/**
 * Run the verification suite; `passed` and `total` count checks that
 * behaved as intended, negative controls included.
 *
 * # Safety
 * Outputs must be valid.
 */
enum PwcStatus pwc_verify_suite(uint64_t seed, size_t *passed, size_t *total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PWCOMPLETE_H */
