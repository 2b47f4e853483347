#ifndef MATCOP_H
#define MATCOP_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum McMode {
  MC_MODE_TABLEAU = 0,
  MC_MODE_MATRIX = 1,
  MC_MODE_CORE = 2,
  MC_MODE_AVATAR = 3,
} McMode;

typedef enum McStatus {
  MC_STATUS_OK = 0,
  MC_STATUS_NULL_ARGUMENT = 1,
  MC_STATUS_INVALID_UTF8 = 2,
  MC_STATUS_PARSE_ERROR = 3,
  MC_STATUS_REJECTED = 4,
  MC_STATUS_INTERNAL = 5,
} McStatus;

typedef enum McVerdict {
  MC_VERDICT_THEOREM = 0,
  MC_VERDICT_NON_THEOREM = 1,
  MC_VERDICT_UNKNOWN = 2,
} McVerdict;

typedef struct McOutcome McOutcome;

typedef struct McProblem McProblem;

/**
 * Zero for `timeout_ms` or `max_solves` means unlimited.
 */
typedef struct McConfig {
  enum McMode mode;
  uint32_t max_depth;
  uint64_t timeout_ms;
  uint64_t max_solves;
  bool copy_order;
  bool subst_order;
  bool instance_sym;
  bool epr_caps;
} McConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses TPTP CNF text into a new problem handle written to `out`.
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
enum McStatus mc_problem_parse(const char *src, struct McProblem **out);

/**
 * `p` must come from `mc_problem_parse` and not be used afterwards.
 */
void mc_problem_free(struct McProblem *p);

/**
 * `p` must be null or a live problem handle.
 */
size_t mc_problem_clause_count(const struct McProblem *p);

struct McConfig mc_config_default(void);

/**
 * Runs the prover; a null `cfg` means `mc_config_default()`.
 * `p` must be a live problem handle, `cfg` null or valid, `out` valid.
 */
enum McStatus mc_prove(const struct McProblem *p,
                       const struct McConfig *cfg,
                       struct McOutcome **out);

/**
 * `o` must be a live outcome handle.
 */
enum McVerdict mc_outcome_verdict(const struct McOutcome *o);

/**
 * The proof document, or null unless the verdict is a theorem. The string
 * lives as long as the outcome.
 * `o` must be null or a live outcome handle.
 */
const char *mc_outcome_proof(const struct McOutcome *o);

/**
 * `o` must come from `mc_prove` and not be used afterwards.
 */
void mc_outcome_free(struct McOutcome *o);

/**
 * `MC_STATUS_OK` when the document proves the problem,
 * `MC_STATUS_REJECTED` when it does not.
 * `p` must be a live problem handle and `proof` a NUL-terminated string.
 */
enum McStatus mc_check_proof(const struct McProblem *p, const char *proof);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library from the same thread.
 */
const char *mc_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MATCOP_H */
