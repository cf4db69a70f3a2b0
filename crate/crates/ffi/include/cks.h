#ifndef CKS_H
#define CKS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>

typedef enum CksStatus {
  CKS_STATUS_OK = 0,
  CKS_STATUS_NULL_ARGUMENT = 1,
  CKS_STATUS_INVALID_UTF8 = 2,
  CKS_STATUS_SYNTAX = 3,
  CKS_STATUS_NOT_IN_CONTEXT = 4,
  CKS_STATUS_INDEX_OUT_OF_RANGE = 5,
  CKS_STATUS_EMPTY_EXTENT = 6,
  CKS_STATUS_EMPTY_INTENT = 7,
  CKS_STATUS_INVALID_INPUT = 8,
  CKS_STATUS_PANIC = 9,
} CksStatus;

/**
 * A formal context.
 */
typedef struct CksContext CksContext;

/**
 * A concept lattice together with the context it was built from.
 */
typedef struct CksLattice CksLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cks_last_error(void);

/**
 * Parses FCIF text into a new context.
 *
 * # Safety
 * `fcif` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CksStatus cks_context_parse_fcif(const char *fcif, struct CksContext **out);

/**
 * # Safety
 * `ctx` must be null or a live context handle.
 */
size_t cks_context_object_count(const struct CksContext *ctx);

/**
 * # Safety
 * `ctx` must be null or a live context handle.
 */
size_t cks_context_attribute_count(const struct CksContext *ctx);

/**
 * # Safety
 * `ctx` must be null or a handle from [`cks_context_parse_fcif`] not yet freed.
 */
void cks_context_free(struct CksContext *ctx);

/**
 * Builds the concept lattice of `ctx`. The context handle stays owned by
 * the caller.
 *
 * # Safety
 * `ctx` must be a live context handle and `out` a writable pointer.
 */
enum CksStatus cks_lattice_build(const struct CksContext *ctx, struct CksLattice **out);

/**
 * Rebuilds a lattice from CLIF text.
 *
 * # Safety
 * `clif` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CksStatus cks_lattice_parse_clif(const char *clif, struct CksLattice **out);

/**
 * # Safety
 * `lattice` must be null or a live lattice handle.
 */
size_t cks_lattice_concept_count(const struct CksLattice *lattice);

/**
 * Writes the lattice as CLIF. Release the string with [`cks_string_free`].
 *
 * # Safety
 * `lattice` must be a live handle, `type_name` a NUL-terminated string and
 * `out` a writable pointer.
 */
enum CksStatus cks_lattice_emit_clif(const struct CksLattice *lattice,
                                     const char *type_name,
                                     char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void cks_string_free(char *s);

/**
 * Whether concept `k0` lies below or at `k1`.
 *
 * # Safety
 * `lattice` must be a live handle and `out` a writable pointer.
 */
enum CksStatus cks_lattice_leq(const struct CksLattice *lattice, size_t k0, size_t k1, bool *out);

/**
 * Size of the common extent of two concepts.
 *
 * # Safety
 * `lattice` must be a live handle and `out` a writable pointer.
 */
enum CksStatus cks_ext_similarity(const struct CksLattice *lattice,
                                  size_t k0,
                                  size_t k1,
                                  size_t *out);

/**
 * Extensional linkage as an exact fraction `numer / denom`.
 *
 * # Safety
 * `lattice` must be a live handle; `numer` and `denom` writable pointers.
 */
enum CksStatus cks_ext_linkage(const struct CksLattice *lattice,
                               size_t k0,
                               size_t k1,
                               size_t *numer,
                               size_t *denom);

/**
 * Intensional linkage as an exact fraction `numer / denom`.
 *
 * # Safety
 * `lattice` must be a live handle; `numer` and `denom` writable pointers.
 */
enum CksStatus cks_int_linkage(const struct CksLattice *lattice,
                               size_t k0,
                               size_t k1,
                               size_t *numer,
                               size_t *denom);

/**
 * # Safety
 * `lattice` must be null or a handle from this library not yet freed.
 */
void cks_lattice_free(struct CksLattice *lattice);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CKS_H */
