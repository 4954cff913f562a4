#ifndef QINT_H
#define QINT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum QintStatus {
  QINT_STATUS_OK = 0,
  QINT_STATUS_NULL_POINTER = 1,
  QINT_STATUS_INVALID_ARGUMENT = 2,
  QINT_STATUS_ZERO_DIVISOR = 3,
  QINT_STATUS_DEGENERATE_SLICE = 4,
  QINT_STATUS_DOMAIN = 5,
  QINT_STATUS_UNSUPPORTED = 6,
  QINT_STATUS_MISSING_REFERENCE = 7,
  QINT_STATUS_SLICE_ESCAPE = 8,
  QINT_STATUS_STEP_TOO_COARSE = 9,
  QINT_STATUS_VERIFICATION_FAILED = 10,
  QINT_STATUS_PANIC = 99,
} QintStatus;

typedef enum QintRule {
  QINT_RULE_LEFT = 0,
  QINT_RULE_MIDPOINT = 1,
} QintRule;

// Opaque analytic function.
typedef struct QintFunction QintFunction;

// Opaque integration path.
typedef struct QintPath QintPath;

// `w + x1·i + x2·j + x3·k`.
typedef struct QintQuat {
  double w;
  double x1;
  double x2;
  double x3;
} QintQuat;

// Outcome of one integration. `abs_error` is NaN when there is no closed form.
typedef struct QintReport {
  size_t steps;
  struct QintQuat value;
  bool has_reference;
  struct QintQuat reference;
  double abs_error;
} QintReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *qint_last_error(void);

// Parses a function: a name (`exp`, `sin`, `x^3`, ...) or a JSON spec.
enum QintStatus qint_function_parse(const char *spec, struct QintFunction **out);

void qint_function_free(struct QintFunction *f);

// Parses a JSON path spec.
enum QintStatus qint_path_parse(const char *spec, struct QintPath **out);

void qint_path_free(struct QintPath *p);

// Hamilton product `a·b`.
enum QintStatus qint_quat_mul(struct QintQuat a, struct QintQuat b, struct QintQuat *out);

enum QintStatus qint_quat_inverse(struct QintQuat a, struct QintQuat *out);

enum QintStatus qint_eval(const struct QintFunction *f, struct QintQuat x, struct QintQuat *out);

enum QintStatus qint_eval_derivative(const struct QintFunction *f,
                                     struct QintQuat x,
                                     struct QintQuat *out);

// The differential of `f` at `x` applied to `delta`.
enum QintStatus qint_differential(const struct QintFunction *f,
                                  struct QintQuat x,
                                  struct QintQuat delta,
                                  struct QintQuat *out);

// Staircase integral of the differential of `f` along `path`. `threads` of 0
// is treated as 1.
enum QintStatus qint_integrate(const struct QintFunction *f,
                               const struct QintPath *path,
                               size_t steps,
                               enum QintRule rule,
                               size_t threads,
                               struct QintReport *out);

enum QintStatus qint_integrate_slice_quadrature(const struct QintFunction *f,
                                                const struct QintPath *path,
                                                size_t steps,
                                                struct QintReport *out);

// Integral of the differential of a logarithm, following its branch along a
// path inside one slice.
enum QintStatus qint_integrate_branch_tracking(const struct QintFunction *f,
                                               const struct QintPath *path,
                                               size_t steps,
                                               struct QintReport *out);

// Runs a verification suite (`"default"` or `"all"`). `tolerance` may be
// NULL, a number or a JSON object. The JSON report is written to `out_json`
// and must be released with [`qint_string_free`]. Returns
// `VerificationFailed` (with the report still written) if any check fails.
enum QintStatus qint_verify_suite_json(const char *suite,
                                       const char *tolerance,
                                       size_t threads,
                                       char **out_json);

void qint_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QINT_H */
