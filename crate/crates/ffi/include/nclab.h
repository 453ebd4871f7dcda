#ifndef NCLAB_H
#define NCLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum NclabStatus {
  NCLAB_STATUS_OK = 0,
  NCLAB_STATUS_NULL_POINTER = 1,
  NCLAB_STATUS_INVALID_UTF8 = 2,
  // Parse errors, bad arguments, dimension mismatches.
  NCLAB_STATUS_INVALID_INPUT = 3,
  // Degree, term, dimension or partition cap exceeded.
  NCLAB_STATUS_CAP_EXCEEDED = 4,
  // Non-Hermitian input, eigensolver or other numerical failure.
  NCLAB_STATUS_NUMERICAL = 5,
  NCLAB_STATUS_BUFFER_TOO_SMALL = 6,
  NCLAB_STATUS_PANIC = 7,
} NclabStatus;

// Power-sum decomposition of a polynomial.
typedef struct NclabDecomposition NclabDecomposition;

// Hermitian matrix.
typedef struct NclabOperator NclabOperator;

// Parsed noncommutative polynomial.
typedef struct NclabPolynomial NclabPolynomial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string.
// Valid until the next failing call on the same thread.
const char *nclab_last_error(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void nclab_string_free(char *s);

// Parses `text` over `generators` letters `A1..Aa`.
//
// # Safety
// `text` must be a NUL-terminated string and `out_poly` writable.
enum NclabStatus nclab_polynomial_parse(const char *text,
                                        uintptr_t generators,
                                        struct NclabPolynomial **out_poly);

// # Safety
// `p` must be null or a handle from [`nclab_polynomial_parse`] not yet freed.
void nclab_polynomial_free(struct NclabPolynomial *p);

// # Safety
// `p` must be a live polynomial handle and `out_sa` writable.
enum NclabStatus nclab_polynomial_is_self_adjoint(const struct NclabPolynomial *p, bool *out_sa);

// # Safety
// `p` must be a live polynomial handle and `out_degree` writable.
enum NclabStatus nclab_polynomial_degree(const struct NclabPolynomial *p, uintptr_t *out_degree);

// Canonical text form; release with [`nclab_string_free`].
//
// # Safety
// `p` must be a live polynomial handle and `out_text` writable.
enum NclabStatus nclab_polynomial_to_string(const struct NclabPolynomial *p, char **out_text);

// Decomposes `p` into power sums of Lie elements with merge ratio
// `q_num/q_den` and the default caps.
//
// # Safety
// `p` must be a live polynomial handle and `out_dec` writable.
enum NclabStatus nclab_decompose(const struct NclabPolynomial *p,
                                 int64_t q_num,
                                 int64_t q_den,
                                 struct NclabDecomposition **out_dec);

// # Safety
// `d` must be null or a handle from [`nclab_decompose`] not yet freed.
void nclab_decomposition_free(struct NclabDecomposition *d);

// # Safety
// `d` must be a live decomposition handle and `out_len` writable.
enum NclabStatus nclab_decomposition_len(const struct NclabDecomposition *d, uintptr_t *out_len);

// Coefficient (rounded to double) and exponent of term `index`.
//
// # Safety
// `d` must be a live decomposition handle; the out pointers writable.
enum NclabStatus nclab_decomposition_term(const struct NclabDecomposition *d,
                                          uintptr_t index,
                                          double *out_re,
                                          double *out_im,
                                          uint32_t *out_exponent);

// Exact JSON report; release with [`nclab_string_free`].
//
// # Safety
// `d` must be a live decomposition handle and `out_json` writable.
enum NclabStatus nclab_decomposition_to_json(const struct NclabDecomposition *d, char **out_json);

// Whether `d` re-expands exactly to `p`.
//
// # Safety
// `d`, `p` must be live handles and `out_equal` writable.
enum NclabStatus nclab_decomposition_round_trip(const struct NclabDecomposition *d,
                                                const struct NclabPolynomial *p,
                                                bool *out_equal);

// Hermitian operator from `dim²` row-major entries given as interleaved
// `(re, im)` doubles.
//
// # Safety
// `entries` must point to `2·dim²` readable doubles and `out_op` be writable.
enum NclabStatus nclab_operator_new(uintptr_t dim,
                                    const double *entries,
                                    struct NclabOperator **out_op);

// # Safety
// `op` must be null or a handle from [`nclab_operator_new`] not yet freed.
void nclab_operator_free(struct NclabOperator *op);

// # Safety
// `op` must be a live operator handle and `out_dim` writable.
enum NclabStatus nclab_operator_dim(const struct NclabOperator *op, uintptr_t *out_dim);

// Ascending eigenvalues into `buf`, which must hold at least `dim` values.
//
// # Safety
// `op` must be a live operator handle and `buf` point to `len` writable doubles.
enum NclabStatus nclab_operator_eigenvalues(const struct NclabOperator *op,
                                            double *buf,
                                            uintptr_t len);

// `‖[Ã^α, B̃^β]‖` under the product trace on `copies` tensor factors.
//
// # Safety
// `a`, `b` must be live operator handles and `out_norm` writable.
enum NclabStatus nclab_commutator_norm(const struct NclabOperator *a,
                                       const struct NclabOperator *b,
                                       uint32_t alpha,
                                       uint32_t beta,
                                       uintptr_t copies,
                                       double *out_norm);

// `ρ^{⊗N}(Ã_{w₁}⋯Ã_{w_m})` for the normalized trace, with 1-based letters.
//
// # Safety
// `ops` must point to `count` live operator handles, `word` to `len`
// readable values, and the out pointers be writable.
enum NclabStatus nclab_exact_moment(const struct NclabOperator *const *ops,
                                    uintptr_t count,
                                    const uint32_t *word,
                                    uintptr_t len,
                                    uint64_t n,
                                    double *out_re,
                                    double *out_im);

// `ρ^{⊗N}(e^{it₁Ã₁}⋯e^{it_aÃ_a})` at one point `t` of length `count`.
//
// # Safety
// `ops` must point to `count` live operator handles, `t` to `count`
// readable doubles, and the out pointers be writable.
enum NclabStatus nclab_ordered_cf(const struct NclabOperator *const *ops,
                                  uintptr_t count,
                                  const double *t,
                                  uintptr_t copies,
                                  double *out_re,
                                  double *out_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCLAB_H */
