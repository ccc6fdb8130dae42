#ifndef BIDGAME_H
#define BIDGAME_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BgStatus {
  BG_STATUS_OK = 0,
  BG_STATUS_NULL_POINTER = 1,
  BG_STATUS_INVALID_UTF8 = 2,
  BG_STATUS_PARSE = 3,
  BG_STATUS_VALIDATION = 4,
  BG_STATUS_DOMAIN = 5,
  BG_STATUS_INTERNAL = 6,
  BG_STATUS_OUT_OF_RANGE = 7,
  BG_STATUS_BUFFER_TOO_SMALL = 8,
  BG_STATUS_PANIC = 9,
} BgStatus;

// A loaded game arena.
typedef struct BgArena BgArena;

// A finished episode.
typedef struct BgTrace BgTrace;

// Exact per-vertex values.
typedef struct BgValues BgValues;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` (NUL
// terminated, truncated to `cap`). Returns the full message length.
//
// # Safety
// `buf` must be null or valid for `cap` bytes.
size_t bg_last_error(char *buf, size_t cap);

// Parses an arena from its text form.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum BgStatus bg_arena_load(const char *text, struct BgArena **out);

// # Safety
// `arena` must come from [`bg_arena_load`] and not be used afterwards.
void bg_arena_free(struct BgArena *arena);

// # Safety
// `arena` must be a live handle and `out` writable.
enum BgStatus bg_arena_vertex_count(const struct BgArena *arena, size_t *out);

// Index of the vertex called `name`.
//
// # Safety
// `arena` must be a live handle, `name` a NUL-terminated string and `out` writable.
enum BgStatus bg_arena_vertex_index(const struct BgArena *arena, const char *name, size_t *out);

// Exact thresholds: richman and reachability values, or the thresholds of
// parity and mean-payoff games.
//
// # Safety
// `arena` must be a live handle and `out` writable.
enum BgStatus bg_solve_exact(const struct BgArena *arena, struct BgValues **out);

// Float thresholds of a richman or reachability game through its
// stochastic game. `out` receives one value per vertex.
//
// # Safety
// `arena` must be a live handle and `out` valid for `len` doubles.
enum BgStatus bg_solve_float(const struct BgArena *arena, double tol, double *out, size_t len);

// # Safety
// `values` must be a live handle and `out` writable.
enum BgStatus bg_values_len(const struct BgValues *values, size_t *out);

// # Safety
// `values` must be a live handle and `out` writable.
enum BgStatus bg_values_get_f64(const struct BgValues *values, size_t index, double *out);

// The value as `p/q` in a newly allocated string.
//
// # Safety
// `values` must be a live handle and `out` writable.
enum BgStatus bg_values_get_string(const struct BgValues *values, size_t index, char **out);

// # Safety
// `values` must come from [`bg_solve_exact`] and not be used afterwards.
void bg_values_free(struct BgValues *values);

// Plays one episode from `start` with strategies given as
// `name[:key=value,...]`. `budget1` and `energy` are rationals such as
// `3/10` or `0.3`; a null `energy` means 0, or the level a Max strategy
// asks for.
//
// # Safety
// Pointers must be live handles, NUL-terminated strings or writable as named.
enum BgStatus bg_simulate(const struct BgArena *arena,
                          const char *p1,
                          const char *p2,
                          const char *budget1,
                          const char *energy,
                          size_t start,
                          uint64_t horizon,
                          uint64_t seed,
                          struct BgTrace **out);

// # Safety
// `trace` must be a live handle and `out` writable.
enum BgStatus bg_trace_rounds(const struct BgTrace *trace, uint64_t *out);

// 1 when no monitor failed and nobody played illegally, else 0.
//
// # Safety
// `trace` must be a live handle and `out` writable.
enum BgStatus bg_trace_all_passed(const struct BgTrace *trace, int32_t *out);

// The episode as JSON lines (one per round, then the summary), or only
// the summary line when `summary_only` is non-zero.
//
// # Safety
// `trace` must be a live handle and `out` writable.
enum BgStatus bg_trace_json(const struct BgTrace *trace, int32_t summary_only, char **out);

// # Safety
// `trace` must come from [`bg_simulate`] and not be used afterwards.
void bg_trace_free(struct BgTrace *trace);

// # Safety
// `s` must be a string returned by this library and not be used afterwards.
void bg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIDGAME_H */
