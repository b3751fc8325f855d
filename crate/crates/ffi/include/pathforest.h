#ifndef PATHFOREST_H
#define PATHFOREST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PfClassKind {
  /**
   * Induced subgraph is a forest.
   */
  PF_CLASS_KIND_FOREST = 0,
  /**
   * Only the degree cap applies.
   */
  PF_CLASS_KIND_DEGREE_ONLY = 1,
} PfClassKind;

typedef enum PfStatus {
  PF_STATUS_OK = 0,
  /**
   * The partition violates a class.
   */
  PF_STATUS_INVALID = 1,
  /**
   * No partition exists.
   */
  PF_STATUS_INFEASIBLE = 2,
  PF_STATUS_BUDGET_EXCEEDED = 3,
  PF_STATUS_PARSE_ERROR = 4,
  PF_STATUS_NULL_POINTER = 5,
  PF_STATUS_BAD_ARGUMENT = 6,
  /**
   * The rotation system is not a planar embedding.
   */
  PF_STATUS_NO_EMBEDDING = 7,
  /**
   * The result is valid but the run logged a research-grade event.
   */
  PF_STATUS_RESEARCH_GRADE = 8,
  PF_STATUS_PANIC = 9,
} PfStatus;

/**
 * Opaque graph handle.
 */
typedef struct PfGraph PfGraph;

typedef struct PfCounts {
  size_t vertices;
  size_t edges;
  /**
   * Zero when the graph has no planar embedding.
   */
  size_t faces;
  size_t components;
  bool has_embedding;
} PfCounts;

/**
 * A class specification. `cap < 0` means unbounded degree.
 */
typedef struct PfClass {
  enum PfClassKind kind;
  int64_t cap;
} PfClass;

/**
 * Charge totals in twelfths.
 */
typedef struct PfAuditSums {
  int64_t initial_twelfths;
  int64_t final_twelfths;
  size_t components;
  size_t negatives;
  bool conservation;
} PfAuditSums;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses PGE text. Non-planar rotations are accepted; such graphs support
 * verify and solve only.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum PfStatus pf_graph_from_pge(const char *text, struct PfGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from `pf_graph_from_pge` not yet freed.
 */
void pf_graph_free(struct PfGraph *g);

/**
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum PfStatus pf_graph_counts(const struct PfGraph *g, struct PfCounts *out);

/**
 * Writes whether the graph has no 4- and no 6-cycles and a planar embedding.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum PfStatus pf_graph_in_class(const struct PfGraph *g, bool *out);

/**
 * Searches for a partition. `budget == 0` selects the default budget. On
 * `PF_STATUS_OK` the parts are written to `parts_out` (length `n`).
 *
 * # Safety
 * `g` must be a live handle, `classes` must hold `count` entries and
 * `parts_out` must hold `n` entries.
 */
enum PfStatus pf_solve(const struct PfGraph *g,
                       const struct PfClass *classes,
                       size_t count,
                       uint64_t budget,
                       uint32_t *parts_out);

/**
 * Returns `PF_STATUS_OK` for a valid partition and `PF_STATUS_INVALID`
 * otherwise; the last-error message then describes the witness.
 *
 * # Safety
 * As for `pf_solve`, with `parts` readable.
 */
enum PfStatus pf_verify(const struct PfGraph *g,
                        const struct PfClass *classes,
                        size_t count,
                        const uint32_t *parts);

/**
 * Builds an (F2, F)-partition by peeling reducible configurations. The
 * partition is written even when the status is `PF_STATUS_RESEARCH_GRADE`.
 *
 * # Safety
 * `g` must be a live handle, `parts_out` must hold `n` entries and
 * `fallbacks_out` must be null or writable.
 */
enum PfStatus pf_construct(const struct PfGraph *g, uint32_t *parts_out, size_t *fallbacks_out);

/**
 * Runs the discharging rules and reports charge totals.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum PfStatus pf_audit_sums(const struct PfGraph *g, struct PfAuditSums *out);

/**
 * Static description of a status.
 */
const char *pf_status_message(enum PfStatus status);

/**
 * Message of the last failure on this thread. Valid until the next failing
 * call on the same thread.
 */
const char *pf_last_error(void);

/**
 * Writes the two `(F2, F)` classes.
 *
 * # Safety
 * `out` must hold two writable entries.
 */
enum PfStatus pf_classes_f2_f(struct PfClass *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PATHFOREST_H */
