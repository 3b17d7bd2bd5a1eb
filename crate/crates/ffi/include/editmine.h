#ifndef EDITMINE_H
#define EDITMINE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum EmStatus {
  EM_STATUS_OK = 0,
  EM_STATUS_NULL_POINTER = 1,
  EM_STATUS_INVALID_UTF8 = 2,
  EM_STATUS_PARSE_ERROR = 3,
  EM_STATUS_IO_ERROR = 4,
  /**
   * The rule does not match the tree.
   */
  EM_STATUS_NO_MATCH = 5,
  EM_STATUS_OUT_OF_RANGE = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  EM_STATUS_PANIC = 7,
} EmStatus;

/**
 * A pattern catalog.
 */
typedef struct EmCatalog EmCatalog;

/**
 * A parsed tree.
 */
typedef struct EmTree EmTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse an s-expression tree.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `tree_out` writable.
 */
enum EmStatus em_tree_parse(const char *source, struct EmTree **tree_out);

/**
 * # Safety
 * `tree` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void em_tree_free(struct EmTree *tree);

/**
 * Render a tree back to s-expression text.
 *
 * # Safety
 * `tree` must be a live handle and `text_out` writable.
 */
enum EmStatus em_tree_to_string(const struct EmTree *tree, char **text_out);

/**
 * Number of leaves of a tree.
 *
 * # Safety
 * `tree` must be a live handle and `size_out` writable.
 */
enum EmStatus em_tree_size(const struct EmTree *tree, size_t *size_out);

/**
 * Read a catalog from its line-delimited text form.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `catalog_out` writable.
 */
enum EmStatus em_catalog_import(const char *source, struct EmCatalog **catalog_out);

/**
 * # Safety
 * `catalog` must come from this library and not be used afterwards. Null
 * is ignored.
 */
void em_catalog_free(struct EmCatalog *catalog);

/**
 * Number of rules in a catalog.
 *
 * # Safety
 * `catalog` must be a live handle and `len_out` writable.
 */
enum EmStatus em_catalog_len(const struct EmCatalog *catalog, size_t *len_out);

/**
 * Human-readable rule listing.
 *
 * # Safety
 * `catalog` must be a live handle and `text_out` writable.
 */
enum EmStatus em_catalog_render(const struct EmCatalog *catalog, char **text_out);

/**
 * Line-delimited text form, readable by [`em_catalog_import`].
 *
 * # Safety
 * `catalog` must be a live handle and `text_out` writable.
 */
enum EmStatus em_catalog_export(const struct EmCatalog *catalog, char **text_out);

/**
 * Rewrite `tree` with rule `index` (0-based). Returns `NoMatch` when the
 * rule's before template does not match the whole tree.
 *
 * # Safety
 * `catalog` and `tree` must be live handles and `tree_out` writable.
 */
enum EmStatus em_catalog_apply(const struct EmCatalog *catalog,
                               size_t index,
                               const struct EmTree *tree,
                               struct EmTree **tree_out);

/**
 * A new catalog keeping rules seen in at least `min_projects` projects and
 * `min_edits` edits; `drop_spurious` also drops renames and rules that fire
 * on anything.
 *
 * # Safety
 * `catalog` must be a live handle and `catalog_out` writable.
 */
enum EmStatus em_catalog_filter(const struct EmCatalog *catalog,
                                size_t min_projects,
                                size_t min_edits,
                                bool drop_spurious,
                                struct EmCatalog **catalog_out);

/**
 * Mine pairs directories (one project each) into an unfiltered catalog.
 *
 * # Safety
 * `dirs` must point to `count` NUL-terminated strings and `catalog_out`
 * must be writable.
 */
enum EmStatus em_mine_pairs(const char *const *dirs,
                            size_t count,
                            size_t dcap_depth,
                            struct EmCatalog **catalog_out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void em_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null after a
 * successful call. Valid until the next call on the same thread; do not
 * free.
 */
const char *em_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDITMINE_H */
