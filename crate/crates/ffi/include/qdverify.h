#ifndef QDVERIFY_H
#define QDVERIFY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QdDegeneracy {
  QD_DEGENERACY_NONE = 0,
  // `B = 0`.
  QD_DEGENERACY_NO_NONORTHOGONALITY = 1,
  // `|b − a| ≥ B`.
  QD_DEGENERACY_SLOPE_EXCEEDS_BENCHMARK_RANGE = 2,
} QdDegeneracy;

typedef enum QdMethod {
  QD_METHOD_CLOSED_FORM = 0,
  QD_METHOD_NUMERIC_SUP = 1,
} QdMethod;

// Result code of every fallible call.
typedef enum QdStatus {
  QD_STATUS_OK = 0,
  QD_STATUS_INVALID_INPUT = 1,
  QD_STATUS_DOMAIN = 2,
  QD_STATUS_COMPLETENESS = 3,
  QD_STATUS_TRUNCATION = 4,
  QD_STATUS_ORACLE_MISMATCH = 5,
  QD_STATUS_IO = 6,
  QD_STATUS_NULL_POINTER = 7,
  QD_STATUS_BUFFER_TOO_SMALL = 8,
  QD_STATUS_INTERNAL = 9,
} QdStatus;

typedef enum QdStorageMode {
  QD_STORAGE_MODE_AS_PUBLISHED = 0,
  QD_STORAGE_MODE_PURE_TARGET = 1,
} QdStorageMode;

// Opaque squeezed-storage analysis.
typedef struct QdStorageReport QdStorageReport;

typedef struct QdVerdict {
  bool is_quantum_domain;
  // `(a + b) / 2`.
  double lhs;
  double rhs;
  enum QdMethod method;
  enum QdDegeneracy degenerate;
  bool marginal;
  bool labels_swapped;
} QdVerdict;

// Mean `(m1, m2)` and covariance entries, vacuum covariance = identity.
typedef struct QdGaussianState {
  double m1;
  double m2;
  double c11;
  double c12;
  double c22;
} QdGaussianState;

typedef struct QdStorageSummary {
  enum QdStorageMode mode;
  double a;
  double b;
  double lhs;
  double rhs_min;
  double theta_min;
  // NaN when the mode uses the literal output covariances as targets.
  double target_r;
  struct QdVerdict verdict;
} QdStorageSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failed call on this thread; empty after a
// success. Valid until the next call into this library on the same thread.
const char *qd_last_error_message(void);

// Library version, static storage.
const char *qd_version(void);

// `B = (1 − γ'²)·γ²`.
//
// # Safety
// `out` must be valid for writes.
enum QdStatus qd_total_nonorthogonality(double gamma, double gamma_prime, double *out);

// Classical benchmark `F_c` at prior `p_plus`.
//
// # Safety
// `out` must be valid for writes.
enum QdStatus qd_classical_fidelity_bound(double b, double p_plus, double *out);

// Prior at which `F_c` has slope `slope`.
//
// # Safety
// `out` must be valid for writes.
enum QdStatus qd_tangency_prior(double b, double slope, double *out);

// Closed-form quantum-domain test.
//
// # Safety
// `out` must be valid for writes.
enum QdStatus qd_criterion(double a,
                           double b,
                           double big_b,
                           double tolerance,
                           struct QdVerdict *out);

// Quantum-domain test by direct numerical supremum.
//
// # Safety
// `out` must be valid for writes.
enum QdStatus qd_criterion_numeric(double a,
                                   double b,
                                   double big_b,
                                   double tolerance,
                                   struct QdVerdict *out);

// Boundary curve into caller buffers of `capacity` entries each. Returns
// `BUFFER_TOO_SMALL` with `*written` set to the required size when
// `capacity < n_points`.
//
// # Safety
// `out_a` and `out_b` must be valid for `capacity` writes; `written` valid for one.
enum QdStatus qd_boundary_curve(double big_b,
                                size_t n_points,
                                double *out_a,
                                double *out_b,
                                size_t capacity,
                                size_t *written);

// Unsquared Uhlmann fidelity of two single-mode Gaussian states.
//
// # Safety
// `s1`, `s2` must point to valid states; `out` valid for writes.
enum QdStatus qd_gaussian_fidelity(const struct QdGaussianState *s1,
                                   const struct QdGaussianState *s2,
                                   double *out);

// Two-state teleportation test at `B = 1/4`.
//
// # Safety
// `out` must be valid for writes.
enum QdStatus qd_teleport_check(double a, double b, struct QdVerdict *out);

// Binary coherent states `|±α⟩` through a line of transmissivity `eta`.
//
// # Safety
// `out` must be valid for writes.
enum QdStatus qd_coherent_verify(double alpha,
                                 double eta,
                                 double a,
                                 double b,
                                 struct QdVerdict *out);

// Squeezed-vacuum storage analysis from dB figures. `label` may be null.
// On success `*out` owns a handle to release with [`qd_storage_report_free`].
//
// # Safety
// `label` must be null or a NUL-terminated string; `out` valid for writes.
enum QdStatus qd_storage_analyze(const char *label,
                                 double x_db,
                                 double y_db,
                                 double xp_db,
                                 double yp_db,
                                 size_t theta_points,
                                 enum QdStorageMode mode,
                                 struct QdStorageReport **out);

// # Safety
// `report` must be null or a handle from [`qd_storage_analyze`] not yet freed.
void qd_storage_report_free(struct QdStorageReport *report);

// # Safety
// `report` must be a live handle; `out` valid for writes.
enum QdStatus qd_storage_report_summary(const struct QdStorageReport *report,
                                        struct QdStorageSummary *out);

// Number of θ samples in the scan; 0 for a null handle.
//
// # Safety
// `report` must be null or a live handle.
size_t qd_storage_report_len(const struct QdStorageReport *report);

// Copies the θ scan: angle, `γ²`, `γ'²`, `B` and criterion rhs. Any output
// pointer may be null to skip that column.
//
// # Safety
// `report` must be a live handle; non-null outputs valid for `capacity` writes.
enum QdStatus qd_storage_report_scan(const struct QdStorageReport *report,
                                     double *theta,
                                     double *gamma_sq,
                                     double *gamma_prime_sq,
                                     double *nonorthogonality,
                                     double *rhs,
                                     size_t capacity);

// Label of the analysed record; owned by the handle.
//
// # Safety
// `report` must be null or a live handle.
const char *qd_storage_report_label(const struct QdStorageReport *report);

// # Safety
// `report` must be null or a live handle.
size_t qd_storage_report_note_count(const struct QdStorageReport *report);

// Note `index`, or null when out of range; owned by the handle.
//
// # Safety
// `report` must be null or a live handle.
const char *qd_storage_report_note(const struct QdStorageReport *report, size_t index);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDVERIFY_H */
