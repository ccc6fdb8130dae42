#include <stdio.h>
#include <string.h>
#include "bidgame.h"

static const char *DETOUR =
    "objective richman\n"
    "vertex v0\nvertex v1 target=2\nvertex v2\nvertex t target=1\n"
    "edge v0 v1\nedge v0 v2\nedge v2 v0\nedge v2 t\n";

int main(void) {
    BgArena *arena = NULL;
    if (bg_arena_load(DETOUR, &arena) != BG_STATUS_OK) return 1;
    BgValues *values = NULL;
    if (bg_solve_exact(arena, &values) != BG_STATUS_OK) return 2;
    char *v0 = NULL;
    if (bg_values_get_string(values, 0, &v0) != BG_STATUS_OK) return 3;
    printf("v0 %s\n", v0);
    int same = strcmp(v0, "2/3") == 0;
    bg_string_free(v0);
    bg_values_free(values);

    BgArena *bad = NULL;
    if (bg_arena_load("objective nonsense\n", &bad) != BG_STATUS_PARSE) return 4;
    char msg[256];
    bg_last_error(msg, sizeof msg);
    printf("error %s\n", msg);

    BgTrace *trace = NULL;
    if (bg_simulate(arena, "richman", "random:seed=7", "0.76", NULL, 0, 50, 1, &trace) != BG_STATUS_OK) return 5;
    uint64_t rounds = 0;
    int passed = 0;
    bg_trace_rounds(trace, &rounds);
    bg_trace_all_passed(trace, &passed);
    printf("rounds %llu passed %d\n", (unsigned long long)rounds, passed);
    bg_trace_free(trace);
    bg_arena_free(arena);
    return same && passed ? 0 : 6;
}
