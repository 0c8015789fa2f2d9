#ifndef NETLAB_H
#define NETLAB_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NetlabFamily {
  NETLAB_FAMILY_THETA = 0,
  NETLAB_FAMILY_TETRA = 1,
  NETLAB_FAMILY_FIGURE8_ODD = 2,
  NETLAB_FAMILY_FIGURE8_ISOSCELES = 3,
  NETLAB_FAMILY_FIGURE8_HEXAGON = 4,
  NETLAB_FAMILY_BIFOCAL_TRIANGLE = 5,
} NetlabFamily;

typedef enum NetlabStatus {
  NETLAB_STATUS_OK = 0,
  NETLAB_STATUS_NULL_POINTER = 1,
  NETLAB_STATUS_INVALID_ARGUMENT = 2,
  NETLAB_STATUS_PARSE_ERROR = 3,
  NETLAB_STATUS_GEOMETRY_ERROR = 4,
  NETLAB_STATUS_VERIFICATION_FAILED = 5,
  NETLAB_STATUS_PANIC = 6,
} NetlabStatus;

/**
 * Opaque geodesic net.
 */
typedef struct NetlabNet NetlabNet;

/**
 * Opaque doubled polygon.
 */
typedef struct NetlabSurface NetlabSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next netlab call on the same thread.
 */
const char *netlab_last_error_message(void);

void netlab_string_free(char *s);

/**
 * Doubled regular n-gon with circumradius `scale`.
 */
enum NetlabStatus netlab_surface_regular(uint32_t n, double scale, struct NetlabSurface **out);

/**
 * Doubled triangle with the given angles in degrees and longest side
 * `scale`.
 */
enum NetlabStatus netlab_surface_triangle(double a_deg,
                                          double b_deg,
                                          double c_deg,
                                          double scale,
                                          struct NetlabSurface **out);

void netlab_surface_free(struct NetlabSurface *s);

enum NetlabStatus netlab_surface_cone_count(const struct NetlabSurface *s, size_t *out);

/**
 * Sum of cone curvatures (4π for any doubled polygon).
 */
enum NetlabStatus netlab_surface_total_curvature(const struct NetlabSurface *s, double *out);

/**
 * Build a net from a known family. `n` is used by the regular-polygon
 * families; `angles_deg` (three doubles) by `Figure8Isosceles` and may be
 * null otherwise.
 */
enum NetlabStatus netlab_construct(enum NetlabFamily family,
                                   uint32_t n,
                                   const double *angles_deg,
                                   struct NetlabNet **out);

enum NetlabStatus netlab_net_from_json(const char *json, struct NetlabNet **out);

enum NetlabStatus netlab_net_to_json(const struct NetlabNet *net, char **out);

void netlab_net_free(struct NetlabNet *net);

enum NetlabStatus netlab_net_edge_count(const struct NetlabNet *net, size_t *out);

/**
 * Verify a net. `tol <= 0` selects the default geometric tolerance.
 * Writes the report JSON to `report_json` when it is not null. Returns
 * `VerificationFailed` when the net does not pass.
 */
enum NetlabStatus netlab_net_verify(const struct NetlabNet *net, double tol, char **report_json);

/**
 * Admissibility summary for the doubled regular n-gon as JSON.
 */
enum NetlabStatus netlab_admissible_json(uint32_t n, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETLAB_H */
