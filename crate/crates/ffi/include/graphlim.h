#ifndef GRAPHLIM_H
#define GRAPHLIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum GlStatus {
  GlStatus_Ok = 0,
  GlStatus_InvalidInput = 1,
  GlStatus_NonConvergence = 2,
  GlStatus_CapExceeded = 3,
  GlStatus_Disconnected = 4,
} GlStatus;

/**
 * Opaque graph handle.
 */
typedef struct GlGraph GlGraph;

/**
 * Builds a graph from `vertex_count` and `edge_count` endpoint pairs laid
 * out as [u0, v0, u1, v1, ...]. On success writes a heap handle to `out`.
 *
 * # Safety
 * `endpoints` must point to 2*edge_count readable u64 values; `out` must be
 * a valid writable pointer.
 */
enum GlStatus gl_graph_build(uint64_t vertex_count,
                             uint64_t edge_count,
                             const uint64_t *endpoints,
                             struct GlGraph **out);

/**
 * Releases a graph handle. Null is a no-op.
 *
 * # Safety
 * `g` must be null or a pointer previously returned by gl_graph_build.
 */
void gl_graph_free(struct GlGraph *g);

/**
 * # Safety
 * `g` must be a valid handle.
 */
uint64_t gl_graph_vertex_count(const struct GlGraph *g);

/**
 * # Safety
 * `g` must be a valid handle.
 */
uint64_t gl_graph_edge_count(const struct GlGraph *g);

/**
 * Degree of `v`; loops count twice.
 *
 * # Safety
 * `g` must be a valid handle and `out` writable.
 */
enum GlStatus gl_graph_degree(const struct GlGraph *g, uint64_t v, uint64_t *out);

/**
 * BFS distances from `source` into `out` (length = vertex count);
 * unreachable vertices get -1.
 *
 * # Safety
 * `out` must point to vertex_count writable i64 values.
 */
enum GlStatus gl_distances_from(const struct GlGraph *g, uint64_t source, int64_t *out);

/**
 * Exact Cheeger constant (graphs up to 24 vertices).
 *
 * # Safety
 * Output pointers must be writable.
 */
enum GlStatus gl_cheeger_exact(const struct GlGraph *g,
                               double *out_value,
                               uint64_t *out_boundary,
                               uint64_t *out_size);

/**
 * Second-smallest Laplacian eigenvalue; `normalized` != 0 selects the
 * normalized Laplacian.
 *
 * # Safety
 * `out` must be writable.
 */
enum GlStatus gl_lambda2(const struct GlGraph *g, int32_t normalized, double *out);

/**
 * p-capacity between vertex sets (potential 1 on sources, 0 on grounds).
 *
 * # Safety
 * Set pointers must cover their declared lengths; `out` writable.
 */
enum GlStatus gl_p_capacity(const struct GlGraph *g,
                            const uint64_t *sources,
                            uint64_t n_sources,
                            const uint64_t *grounds,
                            uint64_t n_grounds,
                            double p,
                            double *out);

/**
 * Effective resistance between vertex sets: 1 / cap_2.
 *
 * # Safety
 * As gl_p_capacity.
 */
enum GlStatus gl_effective_resistance(const struct GlGraph *g,
                                      const uint64_t *sources,
                                      uint64_t n_sources,
                                      const uint64_t *grounds,
                                      uint64_t n_grounds,
                                      double *out);

/**
 * Monte-Carlo escape probability from `root` to the boundary set; writes the
 * estimate and its binomial standard error.
 *
 * # Safety
 * As gl_p_capacity.
 */
enum GlStatus gl_escape_probability(const struct GlGraph *g,
                                    uint64_t root,
                                    const uint64_t *boundary,
                                    uint64_t n_boundary,
                                    uint64_t trials,
                                    uint64_t seed,
                                    double *out_estimate,
                                    double *out_std_error);

/**
 * Canonical hex code of the depth-r ball around `root`, written as a
 * NUL-terminated string into `buf`; `out_len` receives the length without
 * the terminator. Fails with CapExceeded when `buf_len` is too small.
 *
 * # Safety
 * `buf` must point to `buf_len` writable bytes.
 */
enum GlStatus gl_ball_code_hex(const struct GlGraph *g,
                               uint64_t root,
                               uint64_t r,
                               uint8_t *buf,
                               uint64_t buf_len,
                               uint64_t *out_len);

/**
 * Counts (delta, s)-supported points of a point cloud given as
 * dim-major-flattened coordinates; `sufficient` != 0 selects the
 * conservative center mode.
 *
 * # Safety
 * `coords` must hold dim*n readable doubles; `out` writable.
 */
enum GlStatus gl_supported_count(uint64_t dim,
                                 uint64_t n,
                                 const double *coords,
                                 double delta,
                                 uint64_t s,
                                 int32_t sufficient,
                                 uint64_t *out);

/**
 * Minimum Euler genus over all rotation systems (exhaustive; small graphs).
 *
 * # Safety
 * `out` must be writable.
 */
enum GlStatus gl_min_genus_exhaustive(const struct GlGraph *g, uint64_t *out);

/**
 * Static description of a status code.
 */
const char *gl_status_message(enum GlStatus status);

#endif  /* GRAPHLIM_H */
