#ifndef CKP_H
#define CKP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CKP_FAMILY_SPLINE 0

#define CKP_FAMILY_DAUBECHIES 1

#define CKP_PART_PHI 0

#define CKP_PART_PSI 1

#define CKP_LIMIT_DAUB_PHI 0

#define CKP_LIMIT_DAUB_PSI 1

#define CKP_LIMIT_SPLINE_PHI 2

#define CKP_LIMIT_SPLINE_PSI 3

#define CKP_LIMIT_DAUB_RATIO 4

#define CKP_LIMIT_SPLINE_RATIO 5

#define CKP_RATE_DAUB 0

#define CKP_RATE_SPLINE 1

#define CKP_RATE_RATIO 2

#define CKP_RATE_FIXED_K 3

typedef enum CkpStatus {
  CKP_STATUS_OK = 0,
  CKP_STATUS_NULL_POINTER = 1,
  CKP_STATUS_INVALID_ARGUMENT = 2,
  CKP_STATUS_COMPUTATION_FAILED = 3,
  CKP_STATUS_BUFFER_TOO_SMALL = 4,
  CKP_STATUS_PANIC = 5,
} CkpStatus;

// Opaque Daubechies filter.
typedef struct CkpDaubechiesMask CkpDaubechiesMask;

// Opaque Euler-Frobenius polynomial with its roots.
typedef struct CkpEulerFrobenius CkpEulerFrobenius;

// Opaque precomputed Favard constants.
typedef struct CkpFavardTable CkpFavardTable;

typedef struct CkpSplineConstants {
  double phi_peak;
  double phi_peak_value;
  double phi_curvature;
  double psi_peak;
  double psi_peak_value;
  double psi_curvature;
} CkpSplineConstants;

typedef struct CkpRatio {
  double numerator;
  double denominator;
  double ratio;
  double certified_rel_error;
} CkpRatio;

typedef struct CkpNorm {
  double value;
  double rel_error;
} CkpNorm;

typedef struct CkpBernsteinCheck {
  double lhs;
  double rhs;
  bool holds;
} CkpBernsteinCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *ckp_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ckp_version(void);

// Favard constant `K_j`.
//
// # Safety
// `out` must be valid for writing one `double`.
enum CkpStatus ckp_favard(uint32_t j, double *out);

// # Safety
// `out` must be valid for writing one `CkpSplineConstants`.
enum CkpStatus ckp_spline_constants(struct CkpSplineConstants *out);

// Weighted-norm ratio for order `k`.
//
// # Safety
// `out` must be valid for writing one `CkpRatio`.
enum CkpStatus ckp_ratio(int32_t family_id,
                         int32_t part_id,
                         uint32_t m,
                         uint32_t k,
                         double p,
                         double tol,
                         struct CkpRatio *out);

// `(int |w|^{alpha p} |f^(w)|^p dw)^{1/p}`.
//
// # Safety
// `out` must be valid for writing one `CkpNorm`.
enum CkpStatus ckp_weighted_norm(int32_t family_id,
                                 int32_t part_id,
                                 uint32_t m,
                                 double alpha,
                                 double p,
                                 double tol,
                                 struct CkpNorm *out);

// Large-order limit; `psi_order` is used only by `CKP_LIMIT_DAUB_RATIO`.
//
// # Safety
// `out` must be valid for writing one `double`.
enum CkpStatus ckp_predict_limit(int32_t target,
                                 uint32_t k,
                                 double p,
                                 uint32_t psi_order,
                                 double *out);

// # Safety
// `out` must be valid for writing one `double`.
enum CkpStatus ckp_predict_rate(int32_t target, double *out);

// # Safety
// `out` must be valid for writing one `double`.
enum CkpStatus ckp_spline_wavelet_lower_bound(uint32_t m, uint32_t k, double *out);

// Checks the spline Bernstein inequality for `coeffs[0..len]`.
//
// # Safety
// `coeffs` must be valid for `len` reads; `out` valid for one write.
enum CkpStatus ckp_verify_bernstein(uint32_t m,
                                    uint32_t k,
                                    uint32_t h,
                                    double p,
                                    const double *coeffs,
                                    size_t len,
                                    double tol,
                                    struct CkpBernsteinCheck *out);

// Fejer-kernel extremal ratio at index `j`.
//
// # Safety
// `out` must be valid for writing one `double`.
enum CkpStatus ckp_fejer_ratio(uint32_t m, double p, uint32_t j, double tol, double *out);

// Tensor-product constant; `kind` is 1 (psi x phi), 2 (phi x psi) or
// 3 (psi x psi).
//
// # Safety
// `out` must be valid for writing one `double`.
enum CkpStatus ckp_tensor_ratio(uint8_t kind,
                                int32_t family_id,
                                uint32_t m,
                                uint32_t k1,
                                uint32_t k2,
                                double p,
                                double tol,
                                double *out);

// # Safety
// `out` must be valid for writing one pointer.
enum CkpStatus ckp_daubechies_mask_new(uint32_t m, struct CkpDaubechiesMask **out);

// Copies the `2m` coefficients into `buf`.
//
// # Safety
// `mask` must come from [`ckp_daubechies_mask_new`]; see [`copy_out`].
enum CkpStatus ckp_daubechies_mask_coeffs(const struct CkpDaubechiesMask *mask,
                                          double *buf,
                                          size_t cap,
                                          size_t *len_out);

// # Safety
// `mask` must be null or come from [`ckp_daubechies_mask_new`], freed once.
void ckp_daubechies_mask_free(struct CkpDaubechiesMask *mask);

// # Safety
// `out` must be valid for writing one pointer.
enum CkpStatus ckp_euler_frobenius_new(uint32_t m, struct CkpEulerFrobenius **out);

// Copies all `2m - 2` roots, ascending, into `buf`.
//
// # Safety
// `ef` must come from [`ckp_euler_frobenius_new`]; see [`copy_out`].
enum CkpStatus ckp_euler_frobenius_roots(const struct CkpEulerFrobenius *ef,
                                         double *buf,
                                         size_t cap,
                                         size_t *len_out);

// # Safety
// `ef` must be null or come from [`ckp_euler_frobenius_new`], freed once.
void ckp_euler_frobenius_free(struct CkpEulerFrobenius *ef);

// # Safety
// `out` must be valid for writing one pointer.
enum CkpStatus ckp_favard_table_new(uint32_t j_max, struct CkpFavardTable **out);

// `K_j` from the table; `j` beyond the table is an invalid argument.
//
// # Safety
// `table` must come from [`ckp_favard_table_new`]; `out` valid for one write.
enum CkpStatus ckp_favard_table_get(const struct CkpFavardTable *table, uint32_t j, double *out);

// # Safety
// `table` must be null or come from [`ckp_favard_table_new`], freed once.
void ckp_favard_table_free(struct CkpFavardTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CKP_H */
