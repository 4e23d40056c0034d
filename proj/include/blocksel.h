/* blocksel: block-penalized variable selection, C API.
 *
 * All functions return BSEL_OK (0) on success; on failure they return a
 * status code and leave a human-readable message in bsel_last_error()
 * (thread local). Output strings are heap allocated and must be released
 * with bsel_string_free(). Handles are opaque and freed with their
 * matching *_free function. Variable indices and block labels are 1-based
 * in every input and output of this API.
 */
#ifndef BLOCKSEL_H
#define BLOCKSEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BSEL_API __declspec(dllexport)
#else
#define BSEL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bsel_status {
  BSEL_OK = 0,
  BSEL_ERR_INVALID_ARGUMENT = 1,
  BSEL_ERR_DIMENSION = 2,
  BSEL_ERR_RANK_DEFICIENT = 3,
  BSEL_ERR_NOT_NESTED = 4,
  BSEL_ERR_EMPTY = 5,
  BSEL_ERR_DEGENERATE = 6,
  BSEL_ERR_INFEASIBLE = 7,
  BSEL_ERR_TOO_LARGE = 8,
  BSEL_ERR_OUT_OF_RANGE = 9,
  BSEL_ERR_PARSE = 10,
  BSEL_ERR_IO = 11,
  BSEL_ERR_INTERNAL = 12
} bsel_status;

typedef struct bsel_dataset bsel_dataset;
typedef struct bsel_partition bsel_partition;

BSEL_API const char* bsel_version(void);
BSEL_API const char* bsel_status_name(bsel_status status);

/* Message of the last failure on this thread; empty string if none. */
BSEL_API const char* bsel_last_error(void);

BSEL_API void bsel_string_free(char* s);

/* ---- data handles ---------------------------------------------------- */

/* x is row major, n rows by p columns; y has n entries; sigma > 0. */
BSEL_API bsel_status bsel_dataset_create(const double* x, int64_t n, int64_t p,
                                         const double* y, double sigma,
                                         bsel_dataset** out);

/* CSV files: comma separated, no header. */
BSEL_API bsel_status bsel_dataset_load_csv(const char* design_path,
                                           const char* response_path,
                                           double sigma, bsel_dataset** out);

BSEL_API void bsel_dataset_free(bsel_dataset* ds);
BSEL_API int64_t bsel_dataset_rows(const bsel_dataset* ds);
BSEL_API int64_t bsel_dataset_cols(const bsel_dataset* ds);

/* labels: one block label in 1..b per variable. */
BSEL_API bsel_status bsel_partition_create(const int32_t* labels, int64_t p,
                                           bsel_partition** out);
BSEL_API bsel_status bsel_partition_load_csv(const char* path,
                                             bsel_partition** out);
BSEL_API void bsel_partition_free(bsel_partition* pt);
BSEL_API int32_t bsel_partition_blocks(const bsel_partition* pt);
BSEL_API int64_t bsel_partition_size(const bsel_partition* pt);

/* ---- selection ------------------------------------------------------- */

/* Two-step block selection (or the EBIC comparator).
 *
 * options_json keys (all optional):
 *   "variant": "eb" | "a" | "eb-pooled" | "a-pooled" | "ebic"   (default eb)
 *   "zeta": number >= 0, EBIC only                               (default 1)
 *   "iterations": MCMC iterations                                (default 10000)
 *   "seed": unsigned integer                                     (default 185640929)
 *   "p_limit": exhaustive enumeration threshold                  (default 12)
 *   "swap_probability": in [0,1]                                 (default 0.5)
 *   "step2_fresh_search": bool                                   (default false)
 *
 * result_json reports the selected indices, per-block s_hat, the penalties
 * of both steps and a ledger summary. ledger_csv (optional, pass NULL to
 * skip) receives the visited-model table "model,C,NC".
 */
BSEL_API bsel_status bsel_select(const bsel_dataset* ds,
                                 const bsel_partition* pt,
                                 const char* options_json, char** result_json,
                                 char** ledger_csv);

/* Thresholding in the sequence model. y has p entries observed at scale n
 * (y = sqrt(n) beta + noise). Exactly one of taus / kappas must be non-NULL
 * with one entry per block; kappas are converted via tau = sqrt(2 kappa/n). */
BSEL_API bsel_status bsel_sequence_select(const double* y, int64_t p, double n,
                                          const bsel_partition* pt,
                                          const double* taus,
                                          const double* kappas,
                                          char** result_json);

/* ---- diagnostics ------------------------------------------------------ */

/* support: 1-based active indices (the model S the diagnostics refer to).
 *
 * options_json keys (all optional):
 *   "rho_strategy": "exact" | "restricted" | "auto"              (default auto)
 *   "rho_budget": model-count budget for the exact strategy      (default 2^20)
 *   "kappa": array of per-block penalties for the assumption table
 *            (default: the step-1 penalty kappa0 in every block)
 *   "beta_min": array of per-block signal floors                 (default 1.0)
 *
 * result_json carries rho, lambda_bar, per-block lambda_underline and the
 * assumption margins; table_text (optional) receives a readable table.
 */
BSEL_API bsel_status bsel_diagnose(const bsel_dataset* ds,
                                   const bsel_partition* pt,
                                   const int32_t* support, int64_t support_len,
                                   const char* options_json,
                                   char** result_json, char** table_text);

/* ---- simulation -------------------------------------------------------- */

/* Runs a scenario given as JSON (see the scenario schema in the README).
 * jobs = 0 uses all hardware threads. csv receives the long-format results
 * table, metadata_json the seeds/realized-count metadata. */
BSEL_API bsel_status bsel_simulate(const char* scenario_json, int jobs,
                                   char** csv, char** metadata_json);

/* Resolves defaults in a scenario without running it (for --emit-config). */
BSEL_API bsel_status bsel_scenario_normalize(const char* scenario_json,
                                             char** normalized_json);

/* which: "fig1" | "fig2-left" | "fig2-right"; n_grid has grid_len entries.
 * csv receives the long-format curve table. */
BSEL_API bsel_status bsel_figure_curves(const char* which, const int64_t* n_grid,
                                        int64_t grid_len, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* BLOCKSEL_H */
