#ifndef QUDIT_MEMORY_H
#define QUDIT_MEMORY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum QmStatus {
  QM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  QM_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range or inconsistent.
   */
  QM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A simulation produced a state that breaks a physical invariant.
   */
  QM_STATUS_INVARIANT_VIOLATION = 3,
  /**
   * The library panicked; this is a bug.
   */
  QM_STATUS_PANIC = 4,
} QmStatus;

/**
 * Which syndrome table to build.
 */
typedef enum QmTableKind {
  /**
   * The `d` diagonal cosets `X^{i+1}Z^i`, one per syndrome.
   */
  QM_TABLE_KIND_DIAGONAL = 0,
  /**
   * Every error is its own coset.
   */
  QM_TABLE_KIND_SINGLETON = 1,
  /**
   * Cosets of the clock subgroup generated by `Z`.
   */
  QM_TABLE_KIND_CLOCK = 2,
  /**
   * Cosets of the cyclic subgroup generated by a given operator.
   */
  QM_TABLE_KIND_GENERATOR = 3,
} QmTableKind;

/**
 * Opaque syndrome table.
 */
typedef struct QmCosetTable QmCosetTable;

/**
 * Opaque per-trial records and summary of a cycle run.
 */
typedef struct QmCycleResults QmCycleResults;

/**
 * The Weyl operator `ω^p X^m Z^n`. Outputs are reduced into `[0, d)`;
 * inputs may be any integers.
 */
typedef struct QmWeyl {
  int64_t m;
  int64_t n;
  int64_t p;
} QmWeyl;

typedef struct QmCosetEntry {
  size_t label;
  struct QmWeyl representative;
  struct QmWeyl correction;
} QmCosetEntry;

/**
 * Settings for a batch of memory cycles. `cutoff = 0` picks the default
 * coarse cutoff. `subgroup` must not be `Diagonal`; `generator` is read
 * only when it is `Generator`.
 */
typedef struct QmCycleConfig {
  size_t d;
  size_t trials;
  uint64_t seed;
  double sigma_shift;
  double sigma_phase;
  size_t cutoff;
  double epsilon;
  enum QmTableKind subgroup;
  struct QmWeyl generator;
  bool parallel;
} QmCycleConfig;

typedef struct QmCycleRecord {
  size_t trial;
  size_t error_m;
  size_t error_n;
  size_t syndrome;
  bool escalated;
  uint64_t gate_cost;
  double fidelity_after;
  bool corrected;
} QmCycleRecord;

typedef struct QmCycleSummary {
  size_t trials;
  size_t cutoff;
  double mean_fidelity;
  double min_fidelity;
  double corrected_rate;
  double escalation_rate;
  double mean_gate_cost;
} QmCycleSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none failed.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *qm_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qm_version(void);

/**
 * `out = a·b` in dimension `d`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum QmStatus qm_weyl_compose(size_t d, struct QmWeyl a, struct QmWeyl b, struct QmWeyl *out);

/**
 * `out = a⁻¹` in dimension `d`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum QmStatus qm_weyl_inverse(size_t d, struct QmWeyl a, struct QmWeyl *out);

/**
 * Amplitude `Σ_{j=K}^{d−1} ω^{jΔ}` dropped by truncating the transform to
 * its first `K` frequencies.
 *
 * # Safety
 * `re` and `im` must be null or valid for writes.
 */
enum QmStatus qm_truncation_error(size_t d, size_t cutoff, int64_t delta, double *re, double *im);

/**
 * Builds a syndrome table. `generator` is read only for
 * `QM_TABLE_KIND_GENERATOR`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum QmStatus qm_coset_table_new(size_t d,
                                 enum QmTableKind kind,
                                 struct QmWeyl generator,
                                 struct QmCosetTable **out);

/**
 * Releases a table. Null is ignored.
 *
 * # Safety
 * `table` must be null or a handle from `qm_coset_table_new` not yet freed.
 */
void qm_coset_table_free(struct QmCosetTable *table);

/**
 * Number of cosets, which is also the number of syndrome labels.
 *
 * # Safety
 * `table` must be a live handle; `out` must be valid for writes.
 */
enum QmStatus qm_coset_table_len(const struct QmCosetTable *table, size_t *out);

/**
 * The coset with syndrome `label`.
 *
 * # Safety
 * `table` must be a live handle; `out` must be valid for writes.
 */
enum QmStatus qm_coset_table_entry(const struct QmCosetTable *table,
                                   size_t label,
                                   struct QmCosetEntry *out);

/**
 * Syndrome label of `error`.
 *
 * # Safety
 * `table` must be a live handle; `out` must be valid for writes.
 */
enum QmStatus qm_coset_table_classify(const struct QmCosetTable *table,
                                      struct QmWeyl error,
                                      size_t *out);

/**
 * The command-line defaults: `d = 5`, 1000 trials, seed 42, `σ = 0.5`,
 * clock subgroup, parallel.
 */
struct QmCycleConfig qm_cycle_config_default(void);

/**
 * Runs `config.trials` seeded memory cycles.
 *
 * # Safety
 * `config` must point to a valid config; `out` must be valid for writes.
 */
enum QmStatus qm_cycle_run(const struct QmCycleConfig *config, struct QmCycleResults **out);

/**
 * Releases cycle results. Null is ignored.
 *
 * # Safety
 * `results` must be null or a handle from `qm_cycle_run` not yet freed.
 */
void qm_cycle_results_free(struct QmCycleResults *results);

/**
 * Number of trial records.
 *
 * # Safety
 * `results` must be a live handle; `out` must be valid for writes.
 */
enum QmStatus qm_cycle_results_len(const struct QmCycleResults *results, size_t *out);

/**
 * Record of trial `index`.
 *
 * # Safety
 * `results` must be a live handle; `out` must be valid for writes.
 */
enum QmStatus qm_cycle_results_record(const struct QmCycleResults *results,
                                      size_t index,
                                      struct QmCycleRecord *out);

/**
 * Aggregate statistics of the run.
 *
 * # Safety
 * `results` must be a live handle; `out` must be valid for writes.
 */
enum QmStatus qm_cycle_results_summary(const struct QmCycleResults *results,
                                       struct QmCycleSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUDIT_MEMORY_H */
