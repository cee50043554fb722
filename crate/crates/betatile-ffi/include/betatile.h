#ifndef BETATILE_H
#define BETATILE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum BtStatus {
  BT_STATUS_OK = 0,
  /**
   * The computation finished without a certificate.
   */
  BT_STATUS_INCONCLUSIVE = 1,
  BT_STATUS_NULL_POINTER = 2,
  BT_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The polynomial does not define a Pisot number.
   */
  BT_STATUS_NOT_PISOT = 4,
  BT_STATUS_INTERNAL = 5,
} BtStatus;

/**
 * A verified Pisot field together with its β-substitution.
 */
typedef struct BtField BtField;

/**
 * Builds the field of the Pisot root of Σ coeffs[i] xⁱ (constant term first).
 *
 * # Safety
 * `coeffs` must point to `len` readable values and `out` must be writable.
 */
enum BtStatus bt_field_new(const int64_t *coeffs, uintptr_t len, struct BtField **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `field` must come from [`bt_field_new`] and not have been freed.
 */
void bt_field_free(struct BtField *field);

/**
 * Degree of the minimal polynomial, or 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
uintptr_t bt_field_degree(const struct BtField *field);

/**
 * Number of letters of the substitution, or 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
uintptr_t bt_field_letters(const struct BtField *field);

/**
 * β as a double.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum BtStatus bt_field_beta(const struct BtField *field, double *out);

/**
 * Analysis report as JSON: field, kneading data, substitution, matrix, Perron data and splitting.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum BtStatus bt_analyze_json(const struct BtField *field, char **out);

/**
 * Spectrum certificate as JSON. Returns [`BtStatus::Inconclusive`] (with the report written) when
 * some sampled translate did not coincide within `budget`.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum BtStatus bt_spectrum_json(const struct BtField *field,
                               uintptr_t grid,
                               uintptr_t budget,
                               char **out);

/**
 * Greedy β-expansion of `value` ("p/q" or "a0,a1,…"), rendered as text.
 *
 * # Safety
 * `field` must be a live handle, `value` a NUL-terminated string and `out` writable.
 */
enum BtStatus bt_expand(const struct BtField *field, const char *value, char **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void bt_string_free(char *s);

/**
 * Message of the last failure on this thread; empty if none. Valid until the next call on this thread.
 */
const char *bt_last_error_message(void);

#endif  /* BETATILE_H */
