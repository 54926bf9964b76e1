#ifndef PROCREATE_C_API_H
#define PROCREATE_C_API_H

/* C interface to the propulsive-guidance diffusion laboratory. All entry
 * points return a status code; 0 is success. Handles are opaque and must be
 * released with their close/free function. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

enum pc_status {
    PC_OK = 0,
    PC_ERR = 1,        /* internal / evaluation error */
    PC_ERR_CONFIG = 2, /* invalid configuration or arguments */
    PC_ERR_IO = 3      /* filesystem problem */
};

const char* pc_version(void);

/* An experiment loaded from a JSON run config. */
typedef struct pc_experiment pc_experiment;

/* Loads a config; on failure returns a status code and leaves *out NULL. */
int pc_experiment_open(const char* config_path, pc_experiment** out);

/* Overrides applied before running. */
int pc_experiment_set_seed(pc_experiment* exp, unsigned long long seed);
int pc_experiment_set_output_dir(pc_experiment* exp, const char* dir);

/* Runs the paired baseline/guided experiment, writing samples.csv, refs.csv,
 * metrics.json (and scatter.svg for 2-D mixtures) to the output directory. */
int pc_experiment_run(pc_experiment* exp);

/* Writes ablation.csv for the given axis: "n_step", "sampler" or "gamma". */
int pc_experiment_ablate(pc_experiment* exp, const char* axis);

/* Message for the last failing call on this handle; empty string if none. */
const char* pc_experiment_error(const pc_experiment* exp);

void pc_experiment_close(pc_experiment* exp);

/* Renders the baseline-vs-guided table for a finished run directory. *out
 * receives a malloc'd NUL-terminated string; free with pc_string_free. On
 * failure a message is written to errbuf (truncated to errcap). */
int pc_report_render(const char* run_dir, char** out, char* errbuf, size_t errcap);

/* Metric suite between two point CSVs (identity embedding); *out receives a
 * malloc'd JSON string. */
int pc_metrics_render(const char* generated_csv, const char* real_csv, char** out, char* errbuf,
                      size_t errcap);

void pc_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
