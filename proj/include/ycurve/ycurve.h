/* ycurve: arbitrage-free non-parametric yield curve modeling.
 *
 * C interface to the ycurve shared library. All objects are opaque handles
 * created and destroyed through these functions; every fallible call returns
 * a ycv_status and leaves a human-readable message retrievable with
 * ycv_last_error() on the calling thread.
 */
#ifndef YCURVE_YCURVE_H
#define YCURVE_YCURVE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ycv_status {
  YCV_OK = 0,
  YCV_EINVAL = 1,   /* bad arguments or violated preconditions */
  YCV_EPARSE = 2,   /* malformed CSV or config input */
  YCV_EDATA = 3,    /* well-formed input the model cannot accept */
  YCV_ENUMERIC = 4, /* scaling failure, unsolvable quadratic, non-finite result */
  YCV_EIO = 5,      /* file system failure */
  YCV_EUNKNOWN = 6
} ycv_status;

typedef struct ycv_config ycv_config;
typedef struct ycv_panel ycv_panel;
typedef struct ycv_calibration ycv_calibration;

const char* ycv_version(void);

/* Message from the most recent failing call on this thread ("" if none). */
const char* ycv_last_error(void);

/* ---- configuration ------------------------------------------------ */

ycv_status ycv_config_create(ycv_config** out);
ycv_status ycv_config_load(const char* path, ycv_config** out);
/* Set or override a key; unknown keys are rejected. */
ycv_status ycv_config_set(ycv_config* config, const char* key, const char* value);
void ycv_config_free(ycv_config* config);

/* ---- yield panels -------------------------------------------------- */

/* Reads a panel CSV using the grid described by the config
 * (delta/maturities/labels keys). */
ycv_status ycv_panel_read_csv(const char* path, const ycv_config* config, ycv_panel** out);
ycv_status ycv_panel_write_csv(const ycv_panel* panel, const char* path);
ycv_status ycv_panel_shape(const ycv_panel* panel, size_t* rows, size_t* cols);
ycv_status ycv_panel_yield(const ycv_panel* panel, size_t row, size_t col, double* out);
void ycv_panel_free(ycv_panel* panel);

/* Simulates a panel from the config's sigma/initial/steps/seed settings. */
ycv_status ycv_simulate(const ycv_config* config, ycv_panel** out);

/* ---- covariance calibration ---------------------------------------- */

ycv_status ycv_calibrate(const ycv_panel* panel, const ycv_config* config,
                         ycv_calibration** out);
ycv_status ycv_calibration_dim(const ycv_calibration* calibration, size_t* d);
/* matrix name: "s_bias", "s_corrected", "beta" or "correlation";
 * buf must hold d*d doubles (row-major). */
ycv_status ycv_calibration_matrix(const ycv_calibration* calibration, const char* name,
                                  double* buf, size_t buflen);
/* i-th descending eigenvalue share of the correlation matrix. */
ycv_status ycv_calibration_eigen_share(const ycv_calibration* calibration, size_t i,
                                       double* out);
void ycv_calibration_free(ycv_calibration* calibration);

/* ---- batch commands ------------------------------------------------ */

/* Runs one pipeline command ("simulate", "calibrate", "predict", "backtest",
 * "vasicek", "arbitrage", "grid-compare") and writes its output files into
 * out_dir. Deterministic for a fixed config. */
ycv_status ycv_run(const ycv_config* config, const char* command, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* YCURVE_YCURVE_H */
