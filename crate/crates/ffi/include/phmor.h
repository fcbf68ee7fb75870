#ifndef PHMOR_H
#define PHMOR_H

/* Generated by cbindgen from phmor-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every FFI call.
 */
typedef enum PhmorStatus {
  PHMOR_STATUS_OK = 0,
  /**
   * A pointer argument was null or a dimension was invalid.
   */
  PHMOR_STATUS_INVALID_ARGUMENT = 1,
  /**
   * File could not be parsed as PHMX1/LTIX1.
   */
  PHMOR_STATUS_PARSE = 2,
  /**
   * Filesystem failure.
   */
  PHMOR_STATUS_IO = 3,
  /**
   * Numerical failure (unstable system, singular pencil, ...).
   */
  PHMOR_STATUS_NUMERIC = 4,
} PhmorStatus;

/**
 * Selects the error system for `phmor_h2_distance`.
 */
typedef enum PhmorErrorKind {
  PHMOR_ERROR_KIND_IO = 0,
  PHMOR_ERROR_KIND_HAMILTONIAN = 1,
  PHMOR_ERROR_KIND_EXTENDED = 2,
} PhmorErrorKind;

/**
 * Opaque system handle: a pH septuple or a plain state-space model.
 */
typedef struct PhmorSystem PhmorSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *phmor_last_error(void);

/**
 * Reads a PHMX1 or LTIX1 file into a new handle.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid
 * pointer.
 */
enum PhmorStatus phmor_system_read(const char *path, struct PhmorSystem **out);

/**
 * Writes the system in its native text format.
 *
 * # Safety
 * `sys` must be a live handle, `path` a valid NUL-terminated string.
 */
enum PhmorStatus phmor_system_write(const struct PhmorSystem *sys, const char *path);

/**
 * Releases a handle. Null is allowed.
 *
 * # Safety
 * `sys` must come from this library and not be freed twice.
 */
void phmor_system_free(struct PhmorSystem *sys);

/**
 * Builds a pH system from row-major blocks `J R Q G P S N`.
 *
 * # Safety
 * Block pointers must reference buffers of the documented sizes:
 * `J,R,Q` are `n*n`, `G,P` are `n*m`, `S,N` are `m*m`.
 */
enum PhmorStatus phmor_system_from_ph(uintptr_t n,
                                      uintptr_t m,
                                      const double *j,
                                      const double *r,
                                      const double *q,
                                      const double *g,
                                      const double *p,
                                      const double *s,
                                      const double *nmat,
                                      struct PhmorSystem **out);

/**
 * Mass-spring-damper chain generator with scalar coefficients.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PhmorStatus phmor_gen_msd(uintptr_t n_masses,
                               uintptr_t io_dim,
                               double mass,
                               double spring,
                               double damper,
                               struct PhmorSystem **out);

/**
 * RCL ladder generator.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PhmorStatus phmor_gen_rcl(uintptr_t n_cells,
                               double r_val,
                               double c_val,
                               double l_val,
                               struct PhmorSystem **out);

/**
 * State dimension.
 *
 * # Safety
 * `sys` must be a live handle.
 */
uintptr_t phmor_system_order(const struct PhmorSystem *sys);

/**
 * Input dimension.
 *
 * # Safety
 * `sys` must be a live handle.
 */
uintptr_t phmor_system_inputs(const struct PhmorSystem *sys);

/**
 * Nonzero when the handle carries a pH septuple.
 *
 * # Safety
 * `sys` must be a live handle.
 */
int32_t phmor_system_is_ph(const struct PhmorSystem *sys);

/**
 * Checks the pH structure conditions. `tol <= 0` picks the default.
 * `*valid_out` receives 1 when all conditions hold.
 *
 * # Safety
 * `sys` must be a live pH handle, `valid_out` a valid pointer.
 */
enum PhmorStatus phmor_validate(const struct PhmorSystem *sys, double tol, int32_t *valid_out);

/**
 * Copies a named matrix block out of the handle. Valid names: pH blocks
 * `J R Q G P S N` and state-space views `A B C D`. Call with a null
 * buffer to query dimensions; otherwise `buf` must hold `rows * cols`
 * doubles (row-major).
 *
 * # Safety
 * Pointers must be valid; `buf`, when non-null, must hold at least
 * `buf_len` doubles.
 */
enum PhmorStatus phmor_get_matrix(const struct PhmorSystem *sys,
                                  const char *name,
                                  double *buf,
                                  uintptr_t buf_len,
                                  uintptr_t *rows_out,
                                  uintptr_t *cols_out);

/**
 * Structure-preserving minimal realization at relative rank tolerance
 * `tol` (`<= 0` picks `1e-12`).
 *
 * # Safety
 * `sys` must be a live pH handle, `out` a valid pointer.
 */
enum PhmorStatus phmor_minreal(const struct PhmorSystem *sys, double tol, struct PhmorSystem **out);

/**
 * Positive-real balanced truncation to order `r`.
 *
 * # Safety
 * `sys` must be a live handle, `out` a valid pointer.
 */
enum PhmorStatus phmor_reduce_prbt(const struct PhmorSystem *sys,
                                   uintptr_t r,
                                   struct PhmorSystem **out);

/**
 * pH-IRKA reduction to order `r` with seeded tangent directions.
 *
 * # Safety
 * `sys` must be a live pH handle, `out` a valid pointer.
 */
enum PhmorStatus phmor_reduce_phirka(const struct PhmorSystem *sys,
                                     uintptr_t r,
                                     uint64_t seed,
                                     struct PhmorSystem **out);

/**
 * Energy matching: re-selects the Hamiltonian of `rom` to minimize the
 * Hamiltonian-dynamic H2 error against `fom`, leaving the io map
 * untouched. Writes the squared error to `cost_out` when non-null.
 *
 * # Safety
 * `fom` must be a live pH handle, `rom` a live handle, `out` a valid
 * pointer.
 */
enum PhmorStatus phmor_energy_match(const struct PhmorSystem *fom,
                                    const struct PhmorSystem *rom,
                                    struct PhmorSystem **out,
                                    double *cost_out);

/**
 * H2 distance between two systems.
 *
 * # Safety
 * Handles must be live; `dist_out` must be a valid pointer.
 */
enum PhmorStatus phmor_h2_distance(const struct PhmorSystem *fom,
                                   const struct PhmorSystem *rom,
                                   enum PhmorErrorKind which,
                                   double *dist_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHMOR_H */
