/*
 * C API for the misobc link-level simulator.
 *
 * All functions return misobc_status (or a handle that is NULL on failure);
 * misobc_last_error() yields a thread-local description of the most recent
 * failure. Handles are opaque and must be released with the matching
 * *_destroy call.
 */
#ifndef MISOBC_H
#define MISOBC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum misobc_status {
  MISOBC_OK = 0,
  MISOBC_ERR_INVALID_ARGUMENT = 1,
  MISOBC_ERR_DOMAIN = 2,
  MISOBC_ERR_FORMAT = 3,
  MISOBC_ERR_IO = 4,
  MISOBC_ERR_INTERNAL = 5
} misobc_status;

typedef struct misobc_config misobc_config;
typedef struct misobc_result misobc_result;

const char* misobc_version(void);
/* thread-local message for the most recent failing call; never NULL */
const char* misobc_last_error(void);

/* ---- configuration ---- */

misobc_config* misobc_config_create(void);
/* flat `key = value` text file; NULL on parse failure */
misobc_config* misobc_config_load(const char* path);
misobc_status misobc_config_set(misobc_config* cfg, const char* key,
                                const char* value);
misobc_status misobc_config_get(const misobc_config* cfg, const char* key,
                                char* buf, size_t buf_size);
void misobc_config_destroy(misobc_config* cfg);

/* ---- closed forms ---- */

misobc_status misobc_theoretical_dof(double alpha, double* out);
misobc_status misobc_baseline_dof(double alpha, double* out);
misobc_status misobc_doppler_alpha(double v, double fc, double tf, double c,
                                   double* f_out, double* alpha_out);

/* ---- Monte-Carlo sweep ---- */

/* runs the full sweep; NULL on failure */
misobc_result* misobc_sweep_run(const misobc_config* cfg);
/* writes samples.csv, dof_alpha.csv, run_meta.txt under out_dir
 * (out_dir may be NULL to use the configured output directory) */
misobc_status misobc_result_write(const misobc_result* res,
                                  const char* out_dir);
int misobc_result_sample_count(const misobc_result* res);
/* fitted per-user DoF slope for a scheme ("zf", "mat", "mat_variant",
 * "hybrid"); fails if the scheme was not swept or the grid is too small */
misobc_status misobc_result_estimate(const misobc_result* res,
                                     const char* scheme, double* slope,
                                     double* std_err);
void misobc_result_destroy(misobc_result* res);

/* ---- theory curves and validation ---- */

/* dof_alpha.csv rows for alpha in [alpha_min, alpha_max] steps of
 * alpha_step, theory columns only */
misobc_status misobc_emit_theory(const char* path, double alpha_min,
                                 double alpha_max, double alpha_step);

/* runs the invariant/property suite; prints one line per check to
 * report_path (or stdout when NULL); returns the number of failed checks,
 * or -1 on error */
int misobc_validate(const misobc_config* cfg, const char* report_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MISOBC_H */
