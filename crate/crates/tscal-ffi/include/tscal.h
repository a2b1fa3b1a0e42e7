/* C interface to the tscal time-scale calculus engine.
* Opaque handles, status codes, UTF-8 strings. Strings returned
* through out-parameters are freed with tscal_string_free. */

#ifndef TSCAL_H
#define TSCAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of an FFI call.
 */
typedef enum TscalStatus {
  TscalOk = 0,
  TscalErrNullArg = 1,
  TscalErrUtf8 = 2,
  TscalErrParse = 3,
  TscalErrDomain = 4,
  TscalErrNotOnScale = 5,
  TscalErrUnsupported = 6,
} TscalStatus;

/**
 * Opaque function handle (expression-backed).
 */
typedef struct TscalFunction TscalFunction;

/**
 * Opaque time scale handle.
 */
typedef struct TscalScale TscalScale;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread. Valid until the
 * next failing call from the same thread.
 */
const char *tscal_last_error(void);

/**
 * Parses a scale literal such as `interval(0,1)+points(2,3)`.
 */
enum TscalStatus tscal_scale_parse(const char *literal, struct TscalScale **out);

void tscal_scale_free(struct TscalScale *scale);

double tscal_scale_min(const struct TscalScale *scale);

double tscal_scale_max(const struct TscalScale *scale);

/**
 * Forward jump `sigma(t)`.
 */
enum TscalStatus tscal_scale_sigma(const struct TscalScale *scale, double t, double *out);

/**
 * Backward jump `rho(t)`.
 */
enum TscalStatus tscal_scale_rho(const struct TscalScale *scale, double t, double *out);

/**
 * Forward graininess `mu(t)`.
 */
enum TscalStatus tscal_scale_mu(const struct TscalScale *scale, double t, double *out);

/**
 * Backward graininess `nu(t)`.
 */
enum TscalStatus tscal_scale_nu(const struct TscalScale *scale, double t, double *out);

/**
 * Parses an expression in `x` (decimal/scientific literals, `+ - * / ^`,
 * exp/log/sin/cos).
 */
enum TscalStatus tscal_function_parse(const char *expr, struct TscalFunction **out);

void tscal_function_free(struct TscalFunction *f);

/**
 * Function value at a scale point.
 */
enum TscalStatus tscal_eval(const struct TscalFunction *f,
                            const struct TscalScale *scale,
                            double t,
                            double *out);

/**
 * Dynamic derivative at a scale point. `kind`: 0 delta, 1 nabla,
 * 2 diamond with weight `alpha`.
 */
enum TscalStatus tscal_deriv(const struct TscalFunction *f,
                             const struct TscalScale *scale,
                             double t,
                             int32_t kind,
                             double alpha,
                             double *out);

/**
 * Dynamic integral over `[a, b]`.
 */
enum TscalStatus tscal_integral(const struct TscalFunction *f,
                                const struct TscalScale *scale,
                                double a,
                                double b,
                                int32_t kind,
                                double alpha,
                                double *out);

/**
 * Y-function value `(phi^k / psi^k) psi - phi` at a scale point.
 */
enum TscalStatus tscal_y_value(const struct TscalFunction *phi,
                               const struct TscalFunction *psi,
                               const struct TscalScale *scale,
                               double t,
                               int32_t kind,
                               double alpha,
                               double *out);

/**
 * Runs a monotonicity rule check over the whole scale and returns the
 * serialized rule report. `rule_id`: MR2.1, Prop2.2, MR2.2, MR2.3,
 * Prop3.2 or MR3.1. `anchor`: 0 alpha end, 1 beta end (MR2.1).
 * `mr22_case`: 1..4 (MR2.2). `split_t`: ratio turning point (MR2.3).
 * `out_outcome`: 0 verified, 4 hypothesis failed, 5 counterexample.
 * The JSON string is freed with `tscal_string_free`.
 */
enum TscalStatus tscal_check_rule(const char *rule_id,
                                  const struct TscalScale *scale,
                                  const struct TscalFunction *phi,
                                  const struct TscalFunction *psi,
                                  double alpha,
                                  int32_t anchor,
                                  int32_t mr22_case,
                                  double split_t,
                                  char **out_json,
                                  int32_t *out_outcome);

/**
 * Frees a string returned through an out-parameter.
 */
void tscal_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSCAL_H */
