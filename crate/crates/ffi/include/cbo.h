#ifndef CBO_H
#define CBO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum CboStatus {
  CBO_STATUS_OK = 0,
  CBO_STATUS_NULL_POINTER = 1,
  CBO_STATUS_INVALID_ARGUMENT = 2,
  CBO_STATUS_IO = 3,
  CBO_STATUS_PARSE = 4,
  CBO_STATUS_RESOURCE_GUARD = 5,
  CBO_STATUS_PANIC = 6,
} CboStatus;

// Symmetric N×N proxy Hessian.
typedef struct CboHessian CboHessian;

// Energy-ordered list of configurations; rank 0 is the ground state.
typedef struct CboSpectrum CboSpectrum;

// Annealing settings; fill with [`cbo_anneal_default_params`] first.
typedef struct CboAnnealParams {
  size_t restarts;
  size_t steps_per_restart;
  double t_initial;
  double t_final;
  uint64_t seed;
  size_t pool_size;
  double degeneracy_tol;
} CboAnnealParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL if none. The
// string stays valid until the next failing call on the same thread.
const char *cbo_last_error_message(void);

// Copies a row-major `n*n` array into a new Hessian. The matrix must be
// finite and symmetric.
//
// # Safety
// `entries` must point to `n*n` readable doubles and `out` must be writable.
enum CboStatus cbo_hessian_from_dense(size_t n, const double *entries, struct CboHessian **out);

// Builds `(1/m) AᵀA` from `m` row-major gradient rows of length `n`.
//
// # Safety
// `rows` must point to `m*n` readable doubles and `out` must be writable.
enum CboStatus cbo_hessian_from_gradients(size_t m,
                                          size_t n,
                                          const double *rows,
                                          struct CboHessian **out);

// Reads a HESS-1 file.
//
// # Safety
// `path` must be a NUL-terminated UTF-8 string and `out` must be writable.
enum CboStatus cbo_hessian_load(const char *path, struct CboHessian **out);

// # Safety
// `h` must be NULL or a handle from this library not yet freed.
void cbo_hessian_free(struct CboHessian *h);

// Dimension N, or 0 for a NULL handle.
//
// # Safety
// `h` must be NULL or a live handle.
size_t cbo_hessian_dim(const struct CboHessian *h);

// `xᵀHx` for the configuration removing the `m` listed blocks.
//
// # Safety
// `removed` must point to `m` readable indices (it may be NULL when `m` is
// 0) and `out` must be writable.
enum CboStatus cbo_energy(const struct CboHessian *h, const size_t *removed, size_t m, double *out);

// Writes C(n, m) as a decimal string; release it with
// [`cbo_string_free`].
//
// # Safety
// `out` must be writable.
enum CboStatus cbo_count_feasible(size_t n, size_t m, char **out);

// # Safety
// `s` must be NULL or a string returned by this library not yet freed.
void cbo_string_free(char *s);

// Exact top-`k` spectrum at cardinality `m`.
//
// `threads` = 0 uses the available parallelism. The solve is refused with
// [`CboStatus::ResourceGuard`] when C(N, m) exceeds `guard_max_feasible`;
// pass 0 to disable the guard.
//
// # Safety
// `h` must be a live handle and `out` must be writable.
enum CboStatus cbo_solve_exact(const struct CboHessian *h,
                               size_t m,
                               size_t k,
                               double degeneracy_tol,
                               size_t threads,
                               uint64_t guard_max_feasible,
                               struct CboSpectrum **out);

// Default annealing settings for `h`.
//
// # Safety
// `h` must be a live handle and `out` must be writable.
enum CboStatus cbo_anneal_default_params(const struct CboHessian *h, struct CboAnnealParams *out);

// Simulated annealing at cardinality `m`; deterministic for a fixed seed.
//
// # Safety
// `h` and `params` must be valid and `out` must be writable.
enum CboStatus cbo_anneal(const struct CboHessian *h,
                          size_t m,
                          const struct CboAnnealParams *params,
                          struct CboSpectrum **out);

// Default relative degeneracy tolerance.
double cbo_default_degeneracy_tol(void);

// Number of states, or 0 for a NULL handle.
//
// # Safety
// `s` must be NULL or a live handle.
size_t cbo_spectrum_len(const struct CboSpectrum *s);

// Energy of the state at `rank`.
//
// # Safety
// `s` must be a live handle and `out` must be writable.
enum CboStatus cbo_spectrum_energy(const struct CboSpectrum *s, size_t rank, double *out);

// Copies the ascending removed indices of the state at `rank` into `buf`.
//
// `*written` receives the number of indices. When `capacity` is too small
// nothing is copied, `*written` holds the required size and the call
// returns [`CboStatus::InvalidArgument`].
//
// # Safety
// `s` must be a live handle, `buf` must have room for `capacity` indices and
// `written` must be writable.
enum CboStatus cbo_spectrum_removed(const struct CboSpectrum *s,
                                    size_t rank,
                                    size_t *buf,
                                    size_t capacity,
                                    size_t *written);

// # Safety
// `s` must be NULL or a handle from this library not yet freed.
void cbo_spectrum_free(struct CboSpectrum *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CBO_H */
