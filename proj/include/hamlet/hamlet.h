/* hamlet: product-state approximation toolkit for MAX-k-local Hamiltonian
 * instances.
 *
 * C interface of the shared library. All functions return a hamlet_status;
 * on failure hamlet_last_error() describes the problem (thread-local).
 * Strings returned through `char**` are heap-allocated and must be released
 * with hamlet_string_free(); instances with hamlet_instance_free().
 */
#ifndef HAMLET_H
#define HAMLET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HAMLET_API __declspec(dllexport)
#else
#define HAMLET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct hamlet_instance hamlet_instance;

typedef enum hamlet_status {
  HAMLET_OK = 0,
  HAMLET_ERR_INVALID = 1,   /* bad arguments or malformed model */
  HAMLET_ERR_PARSE = 2,     /* malformed serialized input */
  HAMLET_ERR_CAPACITY = 3,  /* dimension exceeds the configured cap */
  HAMLET_ERR_INTERNAL = 4
} hamlet_status;

/* Message for the most recent failure on this thread; empty string if none. */
HAMLET_API const char* hamlet_last_error(void);

HAMLET_API void hamlet_string_free(char* s);
HAMLET_API void hamlet_instance_free(hamlet_instance* inst);

/* Overrides the d^n capacity cap (also settable via HAMLET_MAX_DIM). */
HAMLET_API hamlet_status hamlet_set_max_dim(uint64_t cap);

/* ---- instances ---------------------------------------------------------- */

/* Instance JSON schema:
 * {"n":int,"d":int,"k":int,
 *  "terms":[{"sites":[int,...],"matrix":[[[re,im],...],...]}]} */
HAMLET_API hamlet_status hamlet_instance_parse(const char* json, hamlet_instance** out);
HAMLET_API hamlet_status hamlet_instance_to_json(const hamlet_instance* inst, char** out_json);
HAMLET_API hamlet_status hamlet_instance_shape(const hamlet_instance* inst, int* n, int* d,
                                               int* k, int* term_count);
HAMLET_API hamlet_status hamlet_instance_density(const hamlet_instance* inst, double* density);
/* diagnostics: {"ok":bool,"issues":[string,...]} */
HAMLET_API hamlet_status hamlet_instance_validate(const hamlet_instance* inst,
                                                  char** diagnostics_json);

/* ---- generators --------------------------------------------------------- */

HAMLET_API hamlet_status hamlet_gen_random(int n, int d, int k, uint64_t seed,
                                           hamlet_instance** out);
/* Standard DIMACS CNF text; locality = largest clause arity. */
HAMLET_API hamlet_status hamlet_gen_csp_dimacs(const char* dimacs_text, hamlet_instance** out);
/* Per-term complement I - H_T (swaps min-unsat and max-sat forms). */
HAMLET_API hamlet_status hamlet_instance_complement(const hamlet_instance* inst,
                                                    hamlet_instance** out);
HAMLET_API hamlet_status hamlet_densify(const hamlet_instance* inst, int extra_sites,
                                        hamlet_instance** out);
/* Circuit JSON:
 * {"n_proof":int,"n_ancilla":int,
 *  "gates":[{"targets":[int(,int)],"matrix":[[[re,im],...],...]}]}
 * info_json (optional out): {"scales":[...],"locality":int} */
HAMLET_API hamlet_status hamlet_gen_clock(const char* circuit_json, hamlet_instance** out,
                                          char** info_json);

/* ---- pipeline and oracles ----------------------------------------------- */

/* config JSON keys: mode ("practical"|"theory"), direction
 * ("maximize"|"minimize"), eps, sample_size, g, delta, eps_prime, eps_sdp,
 * cutoff_fraction, seed, iteration_cap, jobs. `partial` is set to 1 when the
 * iteration cap truncated the net-assignment space.  csv_out may be NULL. */
HAMLET_API hamlet_status hamlet_solve(const hamlet_instance* inst, const char* config_json,
                                      char** report_json, char** csv_out, int* partial);
/* Theory-mode parameter arithmetic without running the pipeline. */
HAMLET_API hamlet_status hamlet_theory_plan(const hamlet_instance* inst, double eps,
                                            char** plan_json);
HAMLET_API hamlet_status hamlet_oracle_extreme(const hamlet_instance* inst, int maximize,
                                               uint64_t dim_cap, double* value);
HAMLET_API hamlet_status hamlet_oracle_product(const hamlet_instance* inst, int maximize,
                                               int restarts, uint64_t seed, double* value,
                                               char** assignment_json);
HAMLET_API hamlet_status hamlet_compare(const hamlet_instance* inst, const char* config_json,
                                        uint64_t oracle_cap, char** report_json);
/* Spectral checks of a circuit's clock Hamiltonian (YES bound, lambda_min). */
HAMLET_API hamlet_status hamlet_kitaev_check(const char* circuit_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* HAMLET_H */
