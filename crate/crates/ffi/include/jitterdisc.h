#ifndef JITTERDISC_H
#define JITTERDISC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum JdStatus {
  JD_STATUS_OK = 0,
  JD_STATUS_NULL_POINTER = 1,
  JD_STATUS_INVALID_ARGUMENT = 2,
  JD_STATUS_INFEASIBLE = 3,
  JD_STATUS_DOMAIN = 4,
  JD_STATUS_RANGE = 5,
  JD_STATUS_PARSE = 6,
  JD_STATUS_IO = 7,
  JD_STATUS_CAPACITY = 8,
  JD_STATUS_PANIC = 9,
  JD_STATUS_OTHER = 10,
} JdStatus;

typedef enum JdSampler {
  JD_SAMPLER_JITTERED = 0,
  JD_SAMPLER_HALF_CUBE = 1,
  JD_SAMPLER_UNIFORM = 2,
  JD_SAMPLER_LHS = 3,
} JdSampler;

typedef enum JdDiscKind {
  JD_DISC_KIND_EXACT = 0,
  JD_DISC_KIND_LOWER_WITNESS = 1,
  JD_DISC_KIND_CERTIFIED_UPPER = 2,
} JdDiscKind;

typedef enum JdSide {
  JD_SIDE_NONE = 0,
  JD_SIDE_UNDERFULL = 1,
  JD_SIDE_OVERFULL = 2,
} JdSide;

/**
 * Opaque point set.
 */
typedef struct JdPointSet JdPointSet;

/**
 * Result of a discrepancy computation. `delta` is NaN unless
 * `kind == JD_DISC_KIND_CERTIFIED_UPPER`.
 */
typedef struct JdDiscResult {
  double value;
  double normalized;
  double delta;
  enum JdDiscKind kind;
  enum JdSide side;
} JdDiscResult;

/**
 * Bound values at `(m, d)`. A value is NaN when its formula is undefined.
 */
typedef struct JdBounds {
  double lower_main;
  bool lower_main_applicable;
  double smallm_lower;
  double upper;
  bool upper_applicable;
  double mc_reference;
} JdBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *jd_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *jd_version(void);

/**
 * Generates a point set. `size` is `m` for jittered sets, `d'` for
 * half-cube sets and `N` for uniform and Latin hypercube sets.
 */
enum JdStatus jd_pointset_generate(enum JdSampler sampler,
                                   uint64_t size,
                                   size_t dim,
                                   uint64_t seed,
                                   struct JdPointSet **out);

/**
 * Copies `n * dim` row-major coordinates into a new point set.
 */
enum JdStatus jd_pointset_from_coords(const double *coords,
                                      size_t n,
                                      size_t dim,
                                      struct JdPointSet **out);

enum JdStatus jd_pointset_read(const char *path, struct JdPointSet **out);

enum JdStatus jd_pointset_write(const struct JdPointSet *ps, const char *path);

/**
 * Releases a point set; null is ignored.
 */
void jd_pointset_free(struct JdPointSet *ps);

/**
 * Number of points, or 0 for null.
 */
size_t jd_pointset_len(const struct JdPointSet *ps);

/**
 * Dimension, or 0 for null.
 */
size_t jd_pointset_dim(const struct JdPointSet *ps);

/**
 * Borrowed row-major coordinates (`len * dim` values), valid while the
 * handle lives; null for null.
 */
const double *jd_pointset_coords(const struct JdPointSet *ps);

/**
 * Exact star discrepancy. `corner`, when non-null, receives `dim` witness
 * coordinates.
 */
enum JdStatus jd_star_disc_exact(const struct JdPointSet *ps,
                                 struct JdDiscResult *out,
                                 double *corner);

/**
 * Lower bound from `restarts` randomized local searches.
 */
enum JdStatus jd_star_disc_heuristic(const struct JdPointSet *ps,
                                     size_t restarts,
                                     uint64_t seed,
                                     struct JdDiscResult *out,
                                     double *corner);

/**
 * Certified upper bound on an `(grid+1)^dim` cover.
 */
enum JdStatus jd_star_disc_certified(const struct JdPointSet *ps,
                                     uint32_t grid,
                                     struct JdDiscResult *out,
                                     double *corner);

/**
 * `count - N·vol` for the box `[lo, hi)`; upper faces are closed when
 * `closed` is set. `lo` may be null for an anchored box.
 */
enum JdStatus jd_signed_disc(const struct JdPointSet *ps,
                             const double *lo,
                             const double *hi,
                             bool closed,
                             double *out);

/**
 * Lower and upper bounds for jittered sampling with `m^d` points.
 * `proof_constant` selects the constant carried through the upper-bound
 * proof instead of the stated one.
 */
enum JdStatus jd_bounds(uint64_t m, uint64_t d, bool proof_constant, struct JdBounds *out);

/**
 * `α(c)` for the maximum of `k` binomials `Bin(n, 1/2)`.
 */
enum JdStatus jd_maxbin_alpha(uint64_t n, uint64_t k, double c, double *out);

/**
 * Lower bound on `Pr[X_max >= n/2 + α(c)]`.
 */
enum JdStatus jd_maxbin_prob_bound(uint64_t n, uint64_t k, double c, double *out);

/**
 * Lower bound on `E[max(0, X_max - n/2)]`.
 */
enum JdStatus jd_maxbin_expect_bound(uint64_t n, uint64_t k, double *out);

/**
 * Exact `Pr[X_max >= threshold]`.
 */
enum JdStatus jd_maxbin_exact_prob(uint64_t n, uint64_t k, double threshold, double *out);

/**
 * Exact `E[max(0, X_max - n/2)]`.
 */
enum JdStatus jd_maxbin_exact_expect(uint64_t n, uint64_t k, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JITTERDISC_H */
