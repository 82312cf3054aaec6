#ifndef SRK_H
#define SRK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum SrkStatus {
  SrkStatus_Ok = 0,
  SrkStatus_NullPointer = 1,
  SrkStatus_InvalidUtf8 = 2,
  SrkStatus_Parse = 3,
  SrkStatus_Decomposition = 4,
  SrkStatus_InvalidSpec = 5,
  SrkStatus_OverCap = 6,
  SrkStatus_Invalid = 7,
  SrkStatus_Io = 8,
  SrkStatus_Panic = 9,
} SrkStatus;

/**
 * A decomposition bound to the graph it was built for.
 */
typedef struct SrkDecomposition SrkDecomposition;

typedef struct SrkGraph SrkGraph;

typedef struct SrkReport SrkReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Owned by the
 * library; valid until the next call that fails.
 */
const char *srk_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *srk_version(void);

/**
 * Edgeless graph on `n` vertices.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SrkStatus srk_graph_new(uintptr_t n, struct SrkGraph **out);

/**
 * Parses PACE `.gr` text.
 *
 * # Safety
 * `gr` must be a NUL-terminated string and `out` valid for writes.
 */
enum SrkStatus srk_graph_parse_gr(const char *gr, struct SrkGraph **out);

/**
 * Adds the edge `{u, v}` (0-based). Duplicate edges are ignored.
 *
 * # Safety
 * `g` must be a live graph handle.
 */
enum SrkStatus srk_graph_add_edge(struct SrkGraph *g, uintptr_t u, uintptr_t v);

/**
 * Vertex count, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
uintptr_t srk_graph_vertex_count(const struct SrkGraph *g);

/**
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void srk_graph_free(struct SrkGraph *g);

/**
 * Parses PACE `.td` text and validates it against `g`.
 *
 * # Safety
 * `g` must be a live graph handle, `td` NUL-terminated, `out` valid for
 * writes.
 */
enum SrkStatus srk_td_parse(const struct SrkGraph *g,
                            const char *td,
                            struct SrkDecomposition **out);

/**
 * Min-fill decomposition of `g`.
 *
 * # Safety
 * `g` must be a live graph handle and `out` valid for writes.
 */
enum SrkStatus srk_td_heuristic(const struct SrkGraph *g, struct SrkDecomposition **out);

/**
 * Width (largest bag minus one), or 0 for a null handle.
 *
 * # Safety
 * `td` must be null or a live decomposition handle.
 */
uintptr_t srk_td_width(const struct SrkDecomposition *td);

/**
 * # Safety
 * `td` must be null or a handle not yet freed.
 */
void srk_td_free(struct SrkDecomposition *td);

/**
 * Runs the decomposition DP for `σ = a_sigma mod m`, `ρ = a_rho mod m`.
 * `shifts` may be null; otherwise it holds `shifts_len` entries, one per
 * vertex. `threads` of 0 or 1 runs joins sequentially.
 *
 * # Safety
 * Handles must be live, `td` built for `g`, `shifts` null or valid for
 * `shifts_len` reads, `out` valid for writes.
 */
enum SrkStatus srk_solve(const struct SrkGraph *g,
                         const struct SrkDecomposition *td,
                         uint32_t a_sigma,
                         uint32_t a_rho,
                         uint32_t m,
                         const uint32_t *shifts,
                         uintptr_t shifts_len,
                         uintptr_t threads,
                         struct SrkReport **out);

/**
 * Exhaustive enumeration with the same report layout as [`srk_solve`].
 * Refuses graphs over the enumeration cap with `OverCap`.
 *
 * # Safety
 * As for [`srk_solve`].
 */
enum SrkStatus srk_oracle(const struct SrkGraph *g,
                          uint32_t a_sigma,
                          uint32_t a_rho,
                          uint32_t m,
                          const uint32_t *shifts,
                          uintptr_t shifts_len,
                          struct SrkReport **out);

/**
 * Length of the feasibility vector (`n + 1`).
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
uintptr_t srk_report_len(const struct SrkReport *r);

/**
 * Whether a solution of exactly `size` vertices exists.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
bool srk_report_feasible(const struct SrkReport *r, uintptr_t size);

/**
 * Smallest feasible size, or -1 if there is none.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
int64_t srk_report_min(const struct SrkReport *r);

/**
 * Largest feasible size, or -1 if there is none.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
int64_t srk_report_max(const struct SrkReport *r);

/**
 * The JSON report. Release with [`srk_string_free`]; null on a null handle.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
char *srk_report_json(const struct SrkReport *r);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void srk_report_free(struct SrkReport *r);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void srk_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SRK_H */
