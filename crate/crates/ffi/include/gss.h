#ifndef GSS_H
#define GSS_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define GSS_LEVI_CIVITA 0

#define GSS_SEMISYM_METRIC 1

#define GSS_SEMISYM_NONMETRIC 2

#define GSS_SCHOUTEN_VAN_KAMPEN 3

#define GSS_TANAKA_WEBSTER 4

#define GSS_CLASS_INVARIANT 0

#define GSS_CLASS_ANTI_INVARIANT 1

#define GSS_CLASS_MIXED 2

#define GSS_FORMAT_JSON 0

#define GSS_FORMAT_MARKDOWN 1

// Result code of every fallible call.
typedef enum GssStatus {
  GSS_STATUS_OK = 0,
  GSS_STATUS_NULL_POINTER = 1,
  GSS_STATUS_INVALID_ARGUMENT = 2,
  GSS_STATUS_DIMENSION_MISMATCH = 3,
  GSS_STATUS_PARSE = 4,
  GSS_STATUS_SYMBOLIC = 5,
  GSS_STATUS_CONFIG = 6,
  GSS_STATUS_PANIC = 7,
} GssStatus;

// Symbolic vector-valued tensor expression.
typedef struct GssExpr GssExpr;

// Almost contact metric structure on `R^(2n+1)`.
typedef struct GssSpace GssSpace;

// Linear subspace of the ambient space.
typedef struct GssSubspace GssSubspace;

// The coefficient triple `(f1, f2, f3)`.
typedef struct GssCoefficients {
  double f1;
  double f2;
  double f3;
} GssCoefficients;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *gss_last_error_message(void);

// Releases a string returned by this library.
//
// # Safety
// `s` is null or was returned by this library and not yet freed.
void gss_string_free(char *s);

// Coefficients of the Sasakian-space-form of constant phi-sectional curvature `c`.
//
// # Safety
// `out` is null or valid for writes.
enum GssStatus gss_sasakian_coeffs(double c, struct GssCoefficients *out);

// Standard structure on `R^(2n+1)`.
//
// # Safety
// `out` is null or valid for writes.
enum GssStatus gss_space_standard(uintptr_t n, struct GssSpace **out);

// Structure in a seeded random orthonormal frame.
//
// # Safety
// `out` is null or valid for writes.
enum GssStatus gss_space_frame(uintptr_t n, uint64_t seed, struct GssSpace **out);

// # Safety
// `space` is null or a live handle from this library.
void gss_space_free(struct GssSpace *space);

// Ambient dimension `2n+1`, or 0 for a null handle.
//
// # Safety
// `space` is null or a live handle.
uintptr_t gss_space_dim(const struct GssSpace *space);

// Checks the structure identities; reports the largest residual.
//
// # Safety
// `space` is a live handle; output pointers are null or valid for writes.
enum GssStatus gss_space_validate(const struct GssSpace *space,
                                  double tol,
                                  double *out_max_residual,
                                  bool *out_passed);

// Curvature `R(X,Y)Z` of connection `kind` into `out` (length `len`).
//
// # Safety
// Handles are live; `x`, `y`, `z`, `out` point to `len` doubles.
enum GssStatus gss_curvature(const struct GssSpace *space,
                             const struct GssCoefficients *coeffs,
                             uint32_t kind,
                             const double *x,
                             const double *y,
                             const double *z,
                             uintptr_t len,
                             double *out);

// Invariant subspace containing `xi` with `k` phi-pairs.
//
// # Safety
// `space` is a live handle; `out` is null or valid for writes.
enum GssStatus gss_subspace_invariant(const struct GssSpace *space,
                                      uintptr_t k,
                                      struct GssSubspace **out);

// Anti-invariant subspace containing `xi` with `k` horizontal directions.
//
// # Safety
// `space` is a live handle; `out` is null or valid for writes.
enum GssStatus gss_subspace_anti_invariant(const struct GssSpace *space,
                                           uintptr_t k,
                                           struct GssSubspace **out);

// Seeded subspace that is neither invariant nor anti-invariant.
//
// # Safety
// `space` is a live handle; `out` is null or valid for writes.
enum GssStatus gss_subspace_mixed(const struct GssSpace *space,
                                  uint64_t seed,
                                  struct GssSubspace **out);

// # Safety
// `sub` is null or a live handle from this library.
void gss_subspace_free(struct GssSubspace *sub);

// Dimension of the subspace, or 0 for a null handle.
//
// # Safety
// `sub` is null or a live handle.
uintptr_t gss_subspace_dim(const struct GssSubspace *sub);

// One of the `GSS_CLASS_*` codes.
//
// # Safety
// `sub` is a live handle; `out_class` is null or valid for writes.
enum GssStatus gss_subspace_classify(const struct GssSubspace *sub, uint32_t *out_class);

// Orthogonal tangential and normal parts of `v`.
//
// # Safety
// `sub` is a live handle; `v`, `out_tan`, `out_nor` point to `len` doubles.
enum GssStatus gss_subspace_split(const struct GssSubspace *sub,
                                  const double *v,
                                  uintptr_t len,
                                  double *out_tan,
                                  double *out_nor);

// Parses a vector-valued expression such as `f2*g(X,phi(Y))*phi(Z) - eta(X)*xi`.
//
// # Safety
// `text` is a NUL-terminated string; `out` is null or valid for writes.
enum GssStatus gss_expr_parse(const char *text, struct GssExpr **out);

// New handle holding the normal form of `expr`.
//
// # Safety
// `expr` is a live handle; `out` is null or valid for writes.
enum GssStatus gss_expr_normalize(const struct GssExpr *expr, struct GssExpr **out);

// Text form of `expr`, or null for a null handle. Free with [`gss_string_free`].
//
// # Safety
// `expr` is null or a live handle.
char *gss_expr_to_string(const struct GssExpr *expr);

// # Safety
// `expr` is null or a live handle from this library.
void gss_expr_free(struct GssExpr *expr);

// Symbolic equality after normalization.
//
// # Safety
// Handles are live; `out_equal` is null or valid for writes.
enum GssStatus gss_expr_equal(const struct GssExpr *a, const struct GssExpr *b, bool *out_equal);

// Evaluates `expr` with slots `X`, `Y`, `Z` bound to `x`, `y`, `z`.
//
// # Safety
// Handles are live; `x`, `y`, `z`, `out` point to `len` doubles.
enum GssStatus gss_expr_evaluate(const struct GssExpr *expr,
                                 const struct GssSpace *space,
                                 const struct GssCoefficients *coeffs,
                                 const double *x,
                                 const double *y,
                                 const double *z,
                                 uintptr_t len,
                                 double *out);

// Curvature of connection `kind` derived symbolically from its difference tensor.
//
// # Safety
// `out` is null or valid for writes.
enum GssStatus gss_derive_curvature(uint32_t kind, struct GssExpr **out);

// Runs the full battery. `config` is flat `key = value` text, or null for
// defaults. The rendered report goes to `out_report` (free with
// [`gss_string_free`]) and the number of failed suites to `out_failed`.
//
// # Safety
// `config` is null or NUL-terminated; output pointers are null or valid for writes.
enum GssStatus gss_run_report(const char *config,
                              uint32_t format,
                              char **out_report,
                              uintptr_t *out_failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GSS_H */
