#ifndef MAPGENUS_H
#define MAPGENUS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Count kind selector: maps without legs.
 */
#define MG_KIND_REGULAR 0

/**
 * Count kind selector: maps with two univalent legs.
 */
#define MG_KIND_TWO_LEGGED 1

typedef enum MgStatus {
  MG_STATUS_OK = 0,
  MG_STATUS_NULL_POINTER = 1,
  MG_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The requested (g, j) lies outside the tables the handle was built for.
   */
  MG_STATUS_NOT_COVERED = 3,
  /**
   * The value does not fit the requested integer type.
   */
  MG_STATUS_OVERFLOW = 4,
  MG_STATUS_ENGINE = 5,
  MG_STATUS_PANIC = 6,
} MgStatus;

/**
 * Per-genus histogram from the brute-force oracle.
 */
typedef struct MgHistogram MgHistogram;

/**
 * Series tables for all g ≤ g_max, j ≤ j_max.
 */
typedef struct MgTables MgTables;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *mg_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next library call on this thread.
 */
const char *mg_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a pointer obtained from this library and not yet freed.
 */
void mg_string_free(char *s);

/**
 * Builds the symbolic tables up to genus `g_max` and order `j_max`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum MgStatus mg_tables_new(uint32_t g_max, uint32_t j_max, struct MgTables **out);

/**
 * # Safety
 * `t` must be NULL or a handle from `mg_tables_new` not yet freed.
 */
void mg_tables_free(struct MgTables *t);

/**
 * The count 𝒩_g(2ν, j) of the given kind as a decimal string.
 *
 * # Safety
 * `t` must be a live handle and `out` valid for one pointer write.
 */
enum MgStatus mg_count(const struct MgTables *t,
                       uint32_t kind,
                       uint32_t g,
                       uint32_t j,
                       int64_t nu,
                       char **out);

/**
 * Same as `mg_count`, as an unsigned 64-bit integer.
 *
 * # Safety
 * `t` must be a live handle and `out` valid for one write.
 */
enum MgStatus mg_count_u64(const struct MgTables *t,
                           uint32_t kind,
                           uint32_t g,
                           uint32_t j,
                           int64_t nu,
                           uint64_t *out);

/**
 * The count polynomial in ν (Q for two-legged maps, S for regular ones).
 *
 * # Safety
 * `t` must be a live handle and `out` valid for one pointer write.
 */
enum MgStatus mg_polynomial(const struct MgTables *t,
                            uint32_t kind,
                            uint32_t g,
                            uint32_t j,
                            char **out);

/**
 * Enumerates every matching of j vertices of valence 2ν plus `legs` legs
 * (0 or 2). `threads` = 0 uses the default pool size.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum MgStatus mg_oracle_enumerate(uint32_t nu,
                                  uint32_t j,
                                  uint32_t legs,
                                  uint32_t threads,
                                  struct MgHistogram **out);

/**
 * Number of connected maps of genus g (0 beyond the largest genus seen).
 *
 * # Safety
 * `h` must be a live histogram and `out` valid for one write.
 */
enum MgStatus mg_histogram_count(const struct MgHistogram *h, uint32_t g, uint64_t *out);

/**
 * Largest genus with a nonzero count.
 *
 * # Safety
 * `h` must be a live histogram and `out` valid for one write.
 */
enum MgStatus mg_histogram_max_genus(const struct MgHistogram *h, uint32_t *out);

/**
 * Total matchings visited, connected or not.
 *
 * # Safety
 * `h` must be a live histogram and `out` valid for one write.
 */
enum MgStatus mg_histogram_total(const struct MgHistogram *h, uint64_t *out);

/**
 * # Safety
 * `h` must be NULL or a histogram from `mg_oracle_enumerate` not yet freed.
 */
void mg_histogram_free(struct MgHistogram *h);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MAPGENUS_H */
