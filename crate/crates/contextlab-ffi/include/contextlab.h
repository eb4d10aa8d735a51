/* C interface to the contextlab spin-1 contextuality library. */

#ifndef CONTEXTLAB_H
#define CONTEXTLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call in this interface.
 */
typedef enum {
  /**
   * The call succeeded and all outputs are valid.
   */
  CTX_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CTX_STATUS_NULL_POINTER = 1,
  /**
   * An argument was rejected (out of range, non-finite, degenerate, ...).
   */
  CTX_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Text input could not be parsed.
   */
  CTX_STATUS_PARSE_ERROR = 3,
  /**
   * A panic or other library bug; outputs are untouched.
   */
  CTX_STATUS_INTERNAL = 4,
} CtxStatus;

/**
 * Rendering formats accepted by [`ctxlab_diagram_render`].
 */
typedef enum {
  CTX_DIAGRAM_FORMAT_DOT = 0,
  CTX_DIAGRAM_FORMAT_ASCII = 1,
  CTX_DIAGRAM_FORMAT_JSON = 2,
} CtxDiagramFormat;

/**
 * Opaque handle to an orthogonality diagram.
 */
typedef struct CtxDiagram CtxDiagram;

/**
 * Residuals of the operator identities at one azimuth; see
 * `contextlab::spin::IdentityReport` for the meaning of each field.
 */
typedef struct {
  double phi;
  double base_commutators;
  double rotated_commutators;
  double idempotence;
  double sum_rule_base;
  double sum_rule_rotated;
  double cross_third;
  double cross_first;
} CtxIdentityReport;

/**
 * Outcome of a colorability search over a diagram.
 */
typedef struct {
  /**
   * True iff at least one two-valued measure exists.
   */
  bool colorable;
  /**
   * Total number of two-valued measures (the search is exhaustive).
   */
  uint64_t measure_count;
  /**
   * Search-tree nodes visited; deterministic for a given diagram.
   */
  uint64_t nodes_explored;
} CtxCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the library, as a static NUL-terminated string. Never null;
 * do not free.
 */
const char *ctxlab_version(void);

/**
 * Spin-1 operator for the direction with polar angle `theta` (in [0, pi])
 * and azimuth `phi` (wrapped into [0, 2 pi)), written to `re`/`im`.
 *
 * # Safety
 * `re` and `im` must point to writable `double[9]` buffers.
 */
CtxStatus ctxlab_spin_matrix(double theta, double phi, double *re, double *im);

/**
 * Squared spin component (`component` is 1, 2 or 3) of the orthogonal triple
 * at azimuth `phi`, written to `re`/`im`.
 *
 * # Safety
 * `re` and `im` must point to writable `double[9]` buffers.
 */
CtxStatus ctxlab_squared_spin(uint32_t component, double phi, double *re, double *im);

/**
 * Maximal operator `a J1^2 + b J2^2 + c J3^2` of the triple at azimuth
 * `phi`, written to `re`/`im`. The weights must be pairwise distinct.
 *
 * # Safety
 * `re` and `im` must point to writable `double[9]` buffers.
 */
CtxStatus ctxlab_maximal_operator(double phi, double a, double b, double c, double *re, double *im);

/**
 * Squared spin component recovered from the maximal operator at azimuth
 * `phi` by polynomial reconstruction, written to `re`/`im`. Equals the
 * direct construction of [`ctxlab_squared_spin`] to working precision.
 *
 * # Safety
 * `re` and `im` must point to writable `double[9]` buffers.
 */
CtxStatus ctxlab_reconstruct_component(double phi,
                                       double a,
                                       double b,
                                       double c,
                                       uint32_t component,
                                       double *re,
                                       double *im);

/**
 * Residuals of the operator identities at azimuth `phi`.
 *
 * # Safety
 * `out` must point to a writable `CtxIdentityReport`.
 */
CtxStatus ctxlab_verify_identities(double phi, CtxIdentityReport *out);

/**
 * Exact correlation of the dichotomic readings at relative azimuth `phi`,
 * with the default weights. Identically 1 for every azimuth.
 *
 * # Safety
 * `out` must point to a writable `double`.
 */
CtxStatus ctxlab_exact_correlation(double phi, double *out);

/**
 * Sample-mean correlation over `shots` simulated measurement pairs drawn
 * with the deterministic generator seeded from `seed`. `shots` must be
 * positive.
 *
 * # Safety
 * `out` must point to a writable `double`.
 */
CtxStatus ctxlab_estimate_correlation(double phi, uint64_t shots, uint64_t seed, double *out);

/**
 * Correlation predicted by the strawman context-flipping model with the
 * given flip rate in [0, 1].
 *
 * # Safety
 * `out` must point to a writable `double`.
 */
CtxStatus ctxlab_toy_correlation(double phi, double flip_rate, double *out);

/**
 * Joint outcome distribution of the contexts at azimuths `phi_left` and
 * `phi_right` (default weights on both sides), written to `probs` as a
 * row-major `double[9]`: rows index the left outcome level in ascending
 * order, columns the right one.
 *
 * # Safety
 * `probs` must point to a writable `double[9]` buffer.
 */
CtxStatus ctxlab_joint_distribution(double phi_left, double phi_right, double *probs);

/**
 * Two orthogonal triples sharing their third ray, the second rotated by
 * `phi` about it. Multiples of pi/2 are rejected as degenerate. The handle
 * must be released with [`ctxlab_diagram_free`].
 *
 * # Safety
 * `out` must point to a writable `CtxDiagram*`.
 */
CtxStatus ctxlab_diagram_two_tripods(double phi, CtxDiagram **out);

/**
 * The seventeen-direction set; with `closed` true, its closure under cross
 * products of orthogonal pairs (the noncolorable 57-ray diagram). The
 * handle must be released with [`ctxlab_diagram_free`].
 *
 * # Safety
 * `out` must point to a writable `CtxDiagram*`.
 */
CtxStatus ctxlab_diagram_peres(bool closed, CtxDiagram **out);

/**
 * Builds a diagram from `ray_count` directions given as consecutive
 * (x, y, z) triples; duplicates (up to sign and scale) are merged. With
 * `close` true the set is first closed under cross products of orthogonal
 * pairs. The handle must be released with [`ctxlab_diagram_free`].
 *
 * # Safety
 * `xyz` must point to a readable `double[3 * ray_count]`; `out` must point
 * to a writable `CtxDiagram*`.
 */
CtxStatus ctxlab_diagram_from_rays(const double *xyz,
                                   uintptr_t ray_count,
                                   bool close,
                                   CtxDiagram **out);

/**
 * Number of rays in the diagram; 0 if the handle is null.
 *
 * # Safety
 * `diagram` must be null or a live handle from this library.
 */
uintptr_t ctxlab_diagram_ray_count(const CtxDiagram *diagram);

/**
 * Number of three-ray contexts in the diagram; 0 if the handle is null.
 *
 * # Safety
 * `diagram` must be null or a live handle from this library.
 */
uintptr_t ctxlab_diagram_context_count(const CtxDiagram *diagram);

/**
 * Exhaustive colorability search; fills `out` with the verdict, the total
 * number of two-valued measures and the node count of the search.
 *
 * # Safety
 * `diagram` must be a live handle from this library; `out` must point to a
 * writable `CtxCertificate`.
 */
CtxStatus ctxlab_diagram_check(const CtxDiagram *diagram, CtxCertificate *out);

/**
 * Renders the diagram in the requested format. On success `*out` holds a
 * NUL-terminated string owned by the library; release it with
 * [`ctxlab_string_free`].
 *
 * # Safety
 * `diagram` must be a live handle from this library; `out` must point to a
 * writable `char*`.
 */
CtxStatus ctxlab_diagram_render(const CtxDiagram *diagram, CtxDiagramFormat format, char **out);

/**
 * Releases a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a pointer obtained from [`ctxlab_diagram_render`]
 * that has not been freed yet.
 */
void ctxlab_string_free(char *s);

/**
 * Releases a diagram handle. Null is a no-op.
 *
 * # Safety
 * `diagram` must be null or a pointer obtained from a `ctxlab_diagram_*`
 * constructor that has not been freed yet.
 */
void ctxlab_diagram_free(CtxDiagram *diagram);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONTEXTLAB_H */
