/* Weaver: maximum-likelihood probability vectors for generalized counting
 * data (ionic, unionic, and negatively counted conditional categories).
 *
 * C interface over the shared library. All functions returning int give
 * WEAVER_OK (0) on success and an error code otherwise; the message for the
 * most recent failure on the calling thread is available from
 * weaver_last_error(). Handles are opaque and must be released with the
 * matching *_free function.
 */
#ifndef WEAVER_H
#define WEAVER_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
    WEAVER_OK = 0,
    WEAVER_ERR_INVALID_ARGUMENT = 1,
    WEAVER_ERR_PARSE = 2,
    WEAVER_ERR_MODEL = 3,
    WEAVER_ERR_SINGULAR = 4,
    WEAVER_ERR_SIZE_CAP = 5,
    WEAVER_ERR_IO = 6,
    WEAVER_ERR_NUMERIC = 7,
    WEAVER_ERR_UNKNOWN = 99
};

enum {
    WEAVER_SOLVER_ALLIANCE = 0,
    WEAVER_SOLVER_WEAVER = 1,
    WEAVER_SOLVER_GREEDY = 2,
    WEAVER_SOLVER_MM = 3,
    WEAVER_SOLVER_NEWTON = 4
};

enum {
    WEAVER_STATUS_CONVERGED = 0,
    WEAVER_STATUS_ITERATION_CAP = 1,
    WEAVER_STATUS_DIVERGED_WITH_BEST = 2
};

enum {
    WEAVER_REGULAR = 0,
    WEAVER_IRREGULAR = 1,
    WEAVER_REGULARITY_SIZE_CAP = 2
};

typedef struct weaver_model weaver_model;
typedef struct weaver_solution weaver_solution;

typedef struct weaver_options {
    double sse_tolerance;       /* stop when the reconstruction error falls below */
    int max_iterations;
    double perturbation_factor; /* coordinate probe step of the greedy solver */
    int bookkeeping;            /* track the best iterate seen */
} weaver_options;

void weaver_options_init(weaver_options* opts);

const char* weaver_last_error(void);
const char* weaver_version(void);

/* ---- models ---------------------------------------------------------- */

int weaver_model_from_expression(const char* text, weaver_model** out);
/* format: "expr", "grid", "matches", or "model" */
int weaver_model_from_file(const char* path, const char* format, weaver_model** out);
void weaver_model_free(weaver_model* m);

size_t weaver_model_n(const weaver_model* m);
size_t weaver_model_q(const weaver_model* m);
int weaver_model_ionic_counts(const weaver_model* m, double* buf, size_t len);
int weaver_model_union_counts(const weaver_model* m, double* buf, size_t len);
/* bits of union term `term` as a NUL-terminated 0/1 string of length n */
int weaver_model_pattern(const weaver_model* m, size_t term, char* bits, size_t len);
const char* weaver_model_ion_name(const weaver_model* m, size_t i);
/* canonical structured-text document; round-trips through format "model" */
int weaver_model_write(const weaver_model* m, const char* path);
/* same document as a string; free with weaver_string_free */
int weaver_model_text(const weaver_model* m, char** out);

/* ---- solving --------------------------------------------------------- */

int weaver_solve(const weaver_model* m, int solver, const weaver_options* opts,
                 weaver_solution** out);
void weaver_solution_free(weaver_solution* s);

int weaver_solution_p(const weaver_solution* s, double* buf, size_t len);
double weaver_solution_tau0(const weaver_solution* s);
int weaver_solution_tau(const weaver_solution* s, double* buf, size_t len);
double weaver_solution_sse(const weaver_solution* s);
int weaver_solution_iterations(const weaver_solution* s);
size_t weaver_solution_trace_len(const weaver_solution* s);
int weaver_solution_trace(const weaver_solution* s, double* buf, size_t len);
int weaver_solution_status(const weaver_solution* s);
const char* weaver_solution_solver_name(const weaver_solution* s);

/* ---- diagnostics ----------------------------------------------------- */

typedef struct weaver_regularity {
    int verdict;
    double witness_union_count; /* summed counts of the offending union */
    double witness_covered_sum; /* covered-count sum that went negative */
    size_t negative_terms;
    size_t unions_checked;
    char witness_bits[256];     /* 0/1 string; empty unless irregular */
} weaver_regularity;

int weaver_check_regularity(const weaver_model* m, size_t max_negative_terms,
                            weaver_regularity* out);

/* Reconstruction audit at a caller-supplied positive point of length n
 * (renormalized to the simplex). Output buffers may be NULL when not wanted;
 * tau must hold q entries, the others n entries (sse is a single double). */
int weaver_reconstruct_at(const weaver_model* m, const double* point, size_t len,
                          double* tau, double* tau0, double* recon, double* dev,
                          double* sse);

/* DOT text of the covering graph; free with weaver_string_free */
int weaver_covering_graph_dot(const weaver_model* m, char** out);
void weaver_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* WEAVER_H */
