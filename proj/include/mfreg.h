/* C interface of the manifold functional regression library.
 *
 * All entry points return an mfreg_status; on failure a human-readable
 * message is written into the caller's error buffer (always NUL-terminated
 * when err_len > 0). Handles are opaque and owned by the caller through the
 * matching _free function.
 */
#ifndef MFREG_H
#define MFREG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    MFREG_OK = 0,
    MFREG_ERR_USAGE = 1,   /* bad arguments, bad configuration */
    MFREG_ERR_NUMERIC = 2, /* factorization/quadrature/optimization failure */
    MFREG_ERR_IO = 3       /* filesystem or serialization failure */
} mfreg_status;

typedef struct mfreg_config mfreg_config;

const char* mfreg_version(void);

/* Desk-scale "paper-sim" defaults. */
mfreg_config* mfreg_config_new(void);

/* Loads a JSON experiment configuration; NULL on failure. */
mfreg_config* mfreg_config_load(const char* path, char* err, size_t err_len);

/* String override of one configuration key (seed, scenario, mode, out,
 * N, N_list, R, M, p, threads, paper_scale, burn_in, filter_len, bins,
 * surface_times, debug_pin_theta). */
int mfreg_config_set(mfreg_config* cfg, const char* key, const char* value,
                     char* err, size_t err_len);

void mfreg_config_free(mfreg_config* cfg);

/* Full pipeline: simulation, GLS fits, residual statistics, result bundle
 * with manifest under the config's output directory. */
int mfreg_run_experiment(const mfreg_config* cfg, char* err, size_t err_len);

/* Simulates one error sample (scenario, N, seed from the config) and writes
 * <out_base>.txt and/or <out_base>.bin (+ .bin.json sidecar); format is
 * "text", "binary" or "both". */
int mfreg_simulate(const mfreg_config* cfg, const char* out_base,
                   const char* format, char* err, size_t err_len);

/* GLS fit of a stored sample against a stored design matrix. The per-degree
 * Toeplitz covariance comes from cov_path when non-NULL, otherwise from the
 * configured scenario model. Writes the coefficient/variance table to
 * out_path. */
int mfreg_fit(const char* design_path, const char* sample_path,
              const char* cov_path, const mfreg_config* model_cfg,
              const char* out_path, char* err, size_t err_len);

/* Whittle minimum-contrast estimation of the configured scenario family on a
 * stored sample. Writes the estimate table to out_path; optionally dumps the
 * periodogram. */
int mfreg_estimate_spectrum(const mfreg_config* cfg, const char* sample_path,
                            const char* out_path, const char* periodogram_path,
                            char* err, size_t err_len);

/* Plot-data emission from a completed bundle; selector is "figure-1"..
 * "figure-12" or "all". */
int mfreg_report(const char* bundle_dir, const char* selector,
                 const char* out_dir, char* err, size_t err_len);

#ifdef __cplusplus
}
#endif

#endif /* MFREG_H */
