/* C interface to the 3D-Euclidean stable roommates library.
 *
 * All functions return ESR_OK (0) on success and a nonzero error code on
 * failure; esr_last_error() describes the most recent failure in the
 * calling thread. Rich results are returned as JSON strings that must be
 * released with esr_string_free. Handles are opaque and freed with their
 * esr_*_free function.
 */
#ifndef ESR_H
#define ESR_H

#include <stdint.h>

#if defined(_WIN32)
#define ESR_API __declspec(dllexport)
#else
#define ESR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct esr_x3c esr_x3c;
typedef struct esr_game esr_game;
typedef struct esr_drawing esr_drawing;
typedef struct esr_reduction esr_reduction; /* generated game + artifacts */
typedef struct esr_outcome esr_outcome;

enum {
    ESR_OK = 0,
    ESR_ERROR = 1,  /* operation failed; see esr_last_error */
    ESR_EINVAL = 2, /* invalid argument or malformed input */
    ESR_EIO = 3,    /* file could not be read or written */
};

ESR_API const char* esr_last_error(void);
ESR_API void esr_string_free(char* s);

/* ---- exact cover instances ---- */
ESR_API int esr_x3c_load(const char* path, esr_x3c** out);
ESR_API void esr_x3c_free(esr_x3c* h);
ESR_API int esr_x3c_save(const esr_x3c* h, const char* path);
ESR_API int esr_x3c_validate(const esr_x3c* h, char** report_json);
/* limit <= 0 enumerates every solution */
ESR_API int esr_x3c_solve(const esr_x3c* h, long long limit, char** solutions_json);
ESR_API int esr_x3c_perturb(const esr_x3c* h, uint64_t seed, esr_x3c** out);

/* ---- orthogonal drawings ---- */
ESR_API int esr_draw(const esr_x3c* h, uint64_t seed, esr_drawing** out);
ESR_API int esr_drawing_load(const char* path, esr_drawing** out);
ESR_API void esr_drawing_free(esr_drawing* h);
ESR_API int esr_drawing_save(const esr_drawing* h, const char* path);
ESR_API int esr_drawing_validate(const esr_x3c* inst, const esr_drawing* h, char** report_json);
ESR_API int esr_drawing_svg(const esr_drawing* h, const char* path);

/* ---- games ---- */
ESR_API int esr_game_load(const char* path, esr_game** out);
ESR_API void esr_game_free(esr_game* h);
ESR_API int esr_game_save(const esr_game* h, const char* path);
ESR_API int esr_game_agent_count(const esr_game* h);
ESR_API int esr_game_fingerprint(const esr_game* h, char** hex);
ESR_API int esr_game_export_xyz(const esr_game* h, const char* path);

/* ---- the hardness reduction ---- */
ESR_API int esr_reduce(const esr_x3c* h, double epsilon, uint64_t seed, esr_reduction** out);
ESR_API int esr_reduce_with_drawing(const esr_x3c* h, const esr_drawing* d, double epsilon,
                                    uint64_t seed, esr_reduction** out);
ESR_API int esr_reduction_load(const char* path, esr_reduction** out);
ESR_API void esr_reduction_free(esr_reduction* h);
ESR_API int esr_reduction_save(const esr_reduction* h, const char* path);
ESR_API int esr_reduction_game(const esr_reduction* h, esr_game** out);
ESR_API int esr_reduction_counts(const esr_reduction* h, long long* bottom, long long* top,
                                 long long* ascending);
ESR_API int esr_reduction_validate(const esr_reduction* h, double dist_eq, char** report_json);

/* ---- outcomes ---- */
ESR_API int esr_outcome_pp(const esr_reduction* h, esr_outcome** out);
ESR_API int esr_outcome_reduced(const esr_reduction* h, long long solution_index,
                                esr_outcome** out);
/* game may be NULL to skip the fingerprint check */
ESR_API int esr_outcome_load(const char* path, const esr_game* game, esr_outcome** out);
ESR_API void esr_outcome_free(esr_outcome* h);
ESR_API int esr_outcome_save(const esr_outcome* h, const esr_game* game, const char* path);

ESR_API int esr_verify_outcome(const esr_game* g, const esr_outcome* o, char** report_json);
ESR_API int esr_verify_all_best(const esr_game* g, const esr_outcome* o, double dist_eq,
                                char** report_json);
ESR_API int esr_margin(const esr_game* g, const esr_outcome* pi, const esr_outcome* pi_prime,
                       double dist_eq, char** report_json);
/* strict_mode: 0 popular, 1 strictly popular; exhaustive up to cap_agents,
 * seeded local search with `budget` moves beyond it */
ESR_API int esr_popular_check(const esr_game* g, const esr_outcome* o, int strict_mode,
                              int cap_agents, long long budget, uint64_t seed, double dist_eq,
                              char** verdict_json);
ESR_API int esr_classify_all_best(const esr_reduction* h, const esr_outcome* o, double dist_eq,
                                  char** result_json);
ESR_API int esr_decide_strict_exists(const esr_reduction* h, char** result_json);

#ifdef __cplusplus
}
#endif

#endif /* ESR_H */
