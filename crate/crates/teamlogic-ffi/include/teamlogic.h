#ifndef TEAMLOGIC_H
#define TEAMLOGIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by the fallible functions.
 */
typedef enum TlStatus {
  TlOk = 0,
  /**
   * Malformed formula, model, or proof input.
   */
  TlBadInput = 1,
  /**
   * Evaluation or decision failed (signature, model size, ...).
   */
  TlEvalError = 2,
  /**
   * An enumeration cap was exceeded; retry with the bounded search.
   */
  TlCapExceeded = 3,
  /**
   * The proof was parsed but rejected by the checker.
   */
  TlProofRejected = 4,
  /**
   * A required pointer argument was null.
   */
  TlNullPointer = 5,
} TlStatus;

/**
 * Verdicts returned by the entailment functions.
 */
typedef enum TlVerdict {
  TlEntails = 0,
  TlCounterModel = 1,
  TlBoundExhausted = 2,
} TlVerdict;

/**
 * Opaque formula handle.
 */
typedef struct TlFormula TlFormula;

/**
 * Opaque model handle.
 */
typedef struct TlModel TlModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns a copy of the last error message on this thread, or null.
 * The caller frees it with `tl_string_free`.
 */
char *tl_last_error(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library and not
 * yet freed; null is ignored.
 */
void tl_string_free(char *s);

/**
 * Parses a formula of any of the supported logics.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid
 * location to store the handle.
 */
enum TlStatus tl_formula_parse(const char *text, struct TlFormula **out);

/**
 * Prints a formula in the canonical surface syntax.
 *
 * # Safety
 * `f` must be a live handle from `tl_formula_parse`.
 */
char *tl_formula_print(const struct TlFormula *f);

/**
 * # Safety
 * `f` must be a live handle from `tl_formula_parse`.
 */
uint32_t tl_formula_modal_depth(const struct TlFormula *f);

/**
 * # Safety
 * `f` must be a live handle from `tl_formula_parse`.
 */
bool tl_formula_is_classical(const struct TlFormula *f);

/**
 * # Safety
 * `f` must be a handle from `tl_formula_parse`, not yet freed; null is
 * ignored.
 */
void tl_formula_free(struct TlFormula *f);

/**
 * Parses a model from its JSON representation.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid
 * location to store the handle.
 */
enum TlStatus tl_model_parse(const char *json, struct TlModel **out);

/**
 * Serializes a model back to JSON.
 *
 * # Safety
 * `m` must be a live handle from `tl_model_parse`.
 */
char *tl_model_to_json(const struct TlModel *m);

/**
 * # Safety
 * `m` must be a handle from `tl_model_parse`, not yet freed; null is
 * ignored.
 */
void tl_model_free(struct TlModel *m);

/**
 * Evaluates a formula on a team, given as a comma-separated world list
 * (empty string for the empty team).
 *
 * # Safety
 * `model` and `formula` must be live handles, `team` a valid string,
 * and `out` a valid location for the result.
 */
enum TlStatus tl_eval_team(const struct TlModel *model,
                           const char *team,
                           const struct TlFormula *formula,
                           bool *out);

/**
 * Decides entailment with the normal-form method over the signature of
 * the given formulas.
 *
 * # Safety
 * `premises` must point to `premise_count` valid strings, `conclusion`
 * must be a valid string, and `out` a valid location for the verdict.
 */
enum TlStatus tl_entails_nf(const char *const *premises,
                            uintptr_t premise_count,
                            const char *conclusion,
                            enum TlVerdict *out);

/**
 * Refutation search over all models with up to `max_worlds` worlds.
 *
 * # Safety
 * Same contract as `tl_entails_nf`.
 */
enum TlStatus tl_entails_bounded(const char *const *premises,
                                 uintptr_t premise_count,
                                 const char *conclusion,
                                 uintptr_t max_worlds,
                                 enum TlVerdict *out);

/**
 * Checks a proof file (JSON) against a system (`mlinc`, `mlmight`, or
 * `mlsmight`; pass null to use the system declared in the file). On
 * acceptance, stores the printed conclusion in `out_conclusion` when
 * that pointer is non-null.
 *
 * # Safety
 * `json` must be a valid string; `system` may be null; `out_conclusion`
 * may be null or must be a valid store location.
 */
enum TlStatus tl_check_proof(const char *json, const char *system, char **out_conclusion);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TEAMLOGIC_H */
