/*
 * ionlink C API
 *
 * Shared-library interface to the ion-ion entanglement analysis toolkit:
 * count-table handling, maximum-likelihood tomography, entanglement
 * metrics, bootstrap and Bayesian error estimation, the heralded-
 * entanglement protocol simulator and the photon-collection model.
 *
 * Conventions:
 *  - Every function returns an ionlink_status. On failure,
 *    ionlink_last_error() describes the problem (thread-local).
 *  - Objects are opaque handles released with their _free function.
 *  - String outputs (out_kv, out_csv, ...) are heap buffers owned by the
 *    caller; release them with ionlink_string_free.
 */
#ifndef IONLINK_IONLINK_H
#define IONLINK_IONLINK_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ionlink_status {
  IONLINK_OK = 0,
  IONLINK_ERR_VALIDATION = 1,
  IONLINK_ERR_NUMERICAL = 2
} ionlink_status;

typedef struct ionlink_table ionlink_table;     /* one herald pattern's counts */
typedef struct ionlink_dataset ionlink_dataset; /* four pattern tables */
typedef struct ionlink_state ionlink_state;     /* density matrix */

const char* ionlink_last_error(void);
void ionlink_string_free(char* s);

/* ---- count tables (CSV: basis_a,basis_b,pp,mp,pm,mm; 9 rows ZZ..YY) ---- */

ionlink_status ionlink_table_parse(const char* csv_text, ionlink_table** out);
ionlink_status ionlink_table_load(const char* path, ionlink_table** out);
ionlink_status ionlink_table_to_csv(const ionlink_table* t, char** out_csv);
ionlink_status ionlink_table_total(const ionlink_table* t, double* out_total);
void ionlink_table_free(ionlink_table* t);

/* ---- datasets (four tables in canonical herald-pattern order) ---- */

ionlink_status ionlink_dataset_builtin(ionlink_dataset** out);
ionlink_status ionlink_dataset_load(const char* const paths[4], ionlink_dataset** out);
ionlink_status ionlink_dataset_table(const ionlink_dataset* ds, int pattern,
                                     ionlink_table** out);
ionlink_status ionlink_dataset_pattern_name(const ionlink_dataset* ds, int pattern,
                                            char** out_name);
void ionlink_dataset_free(ionlink_dataset* ds);

/* ---- density matrices (text: row,col,re,im per line) ---- */

ionlink_status ionlink_state_load(const char* path, ionlink_state** out);
ionlink_status ionlink_state_parse(const char* text, ionlink_state** out);
ionlink_status ionlink_state_to_text(const ionlink_state* s, char** out_text);
void ionlink_state_free(ionlink_state* s);

/* ---- tomography ---- */

/* method: "rrr" (diluted fixed point) or "direct" (parameterized ascent).
 * tolerance/max_iterations <= 0 select the defaults (1e-10, 100000).
 * out_diag_kv (optional) receives iteration diagnostics. */
ionlink_status ionlink_fit(const ionlink_table* t, const char* method, double tolerance,
                           long max_iterations, ionlink_state** out_state, char** out_diag_kv);

/* metric: "fef", "concurrence" or "ef". mode: "parametric" or
 * "nonparametric". Writes the replicate summary to out_kv. */
ionlink_status ionlink_bootstrap(const ionlink_table* t, const char* mode, const char* metric,
                                 int replicates, uint64_t seed, int threads, char** out_kv);

/* Metropolis-Hastings posterior sampling of a metric under the
 * Hilbert-Schmidt prior. chain/burn_in/thinning <= 0 select the defaults
 * (200000 / 20000 / 10). */
ionlink_status ionlink_bayes(const ionlink_table* t, const char* metric, long chain_length,
                             long burn_in, long thinning, uint64_t seed, char** out_kv);

/* ---- metrics ---- */

/* Fully entangled fraction, concurrence, entanglement of formation plus
 * fidelities to the four canonical Bell states, as a key-value block. */
ionlink_status ionlink_state_metrics(const ionlink_state* s, char** out_kv);

/* Local-unitary rotation maximizing overlap with a Bell target
 * ("phi_plus", "phi_minus", "psi_plus", "psi_minus"). */
ionlink_status ionlink_state_rotate_to_bell(const ionlink_state* s, const char* target,
                                            ionlink_state** out_rotated, double* out_overlap);

/* ---- pipeline (the `report` command) ---- */

/* Fits all four patterns, averages merits, optional per-pattern parametric
 * bootstrap (bootstrap_b = 0 disables). Writes per-pattern files under
 * out_dir when non-NULL. Summary key-value block in out_kv. */
ionlink_status ionlink_report(const ionlink_dataset* ds, int bootstrap_b, uint64_t seed,
                              int threads, const char* out_dir, char** out_kv);

/* Measured vs MLE-predicted Pauli expectations with bootstrap 95% bands,
 * as CSV (the bar-plot data). */
ionlink_status ionlink_pauli_bars(const ionlink_dataset* ds, int bootstrap_b, uint64_t seed,
                                  int threads, char** out_csv);

/* ---- protocol simulator ---- */

/* config_path NULL selects the documented defaults. Writes four pattern
 * CSVs, attempts.csv and attempts_histogram.csv under out_dir, and the
 * run summary (P, attempt rate, entanglement rate) to out_kv. */
ionlink_status ionlink_simulate(const char* config_path, uint64_t seed, long heralds_per_setting,
                                const char* out_dir, char** out_kv);

/* A documented sample configuration file. */
ionlink_status ionlink_default_config(char** out_text);

/* ---- photon-collection optics ---- */

/* CSV `na,free_space_eff,fiber_eff,free_space_fidelity` over the grid.
 * quadrature_points <= 0 selects the default (256). */
ionlink_status ionlink_optics_curve(const double* na_grid, int n, int quadrature_points,
                                    char** out_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IONLINK_IONLINK_H */
