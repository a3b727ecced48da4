/* SPDX-License-Identifier: Apache-2.0
 *
 * bodyauth -- on-/off-body device authentication from RSS traces
 * Copyright (c) 2026 bodyauth developers
 *
 * Public C API of the bodyauth shared library. All entry points return a
 * ba_status; on failure ba_last_error() describes what went wrong for the
 * calling thread. Objects are opaque handles released with the matching
 * *_free function (free functions accept NULL).
 *
 * Labels on the wire: device 0 = off-body, 1 = on-body; motions are
 * 0 sitting, 1 standing, 2 arm_moving, 3 rotating, 4 walking,
 * 5 uncontrolled (test-only).
 */

#ifndef BODYAUTH_H
#define BODYAUTH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ba_status {
    BA_OK = 0,
    BA_ERR_INVALID_ARGUMENT = 1,
    BA_ERR_IO = 2,
    BA_ERR_PARSE = 3,
    BA_ERR_TOO_SHORT = 4,
    BA_ERR_FORMAT_VERSION = 5,
    BA_ERR_CORRUPT = 6,
    BA_ERR_STATE = 7,
    BA_ERR_NUMERIC = 8,
    BA_ERR_UNSUPPORTED = 9,
} ba_status;

/* Thread-local message for the most recent failure on this thread. */
const char* ba_last_error(void);
const char* ba_version_string(void);

/* Frees strings returned through char** out-parameters. */
void ba_string_free(char* s);

/* --- synthetic channel configuration ----------------------------------- */

typedef struct ba_synth_config ba_synth_config;

ba_status ba_synth_config_create_default(ba_synth_config** out);
ba_status ba_synth_config_load(const char* path, ba_synth_config** out);
ba_status ba_synth_config_save(const ba_synth_config* config, const char* path);
ba_status ba_synth_config_set_duration(ba_synth_config* config, double seconds);
void ba_synth_config_free(ba_synth_config* config);

/* --- RSS traces ---------------------------------------------------------- */

typedef struct ba_trace ba_trace;
typedef struct ba_trace_list ba_trace_list;

ba_status ba_trace_synth(const ba_synth_config* config, int device_label,
                         int motion_label, uint64_t seed, ba_trace** out);
/* CSV with header `t_s,rss_dbm`; resampled to uniform 500 Hz. */
ba_status ba_trace_load_csv(const char* path, int device_label,
                            int motion_label, ba_trace** out);
ba_status ba_trace_save_csv(const ba_trace* trace, const char* path);
ba_status ba_trace_samples(const ba_trace* trace, const double** samples,
                           size_t* count);
ba_status ba_trace_labels(const ba_trace* trace, int* device_label,
                          int* motion_label);
ba_status ba_trace_seed(const ba_trace* trace, uint64_t* seed);
void ba_trace_free(ba_trace* trace);

typedef struct ba_cell_count {
    int device_label;
    int motion_label;
    int count;
} ba_cell_count;

/* One trace per requested count, cells in the given order; per-trace seeds
 * derive deterministically from `master_seed`. */
ba_status ba_trace_list_synth(const ba_synth_config* config,
                              const ba_cell_count* cells, size_t n_cells,
                              uint64_t master_seed, ba_trace_list** out);
/* Balanced convenience: `per_cell` traces per (device, controlled motion)
 * pair plus `uncontrolled_per_link` uncontrolled traces per device. */
ba_status ba_trace_list_synth_balanced(const ba_synth_config* config,
                                       int per_cell, int uncontrolled_per_link,
                                       uint64_t master_seed,
                                       ba_trace_list** out);
ba_status ba_trace_list_size(const ba_trace_list* list, size_t* count);
/* Borrowed reference; valid while the list lives. */
ba_status ba_trace_list_get(const ba_trace_list* list, size_t index,
                            const ba_trace** out);
void ba_trace_list_free(ba_trace_list* list);

/* --- propagation profiles ------------------------------------------------ */

typedef struct ba_profile_set ba_profile_set;

ba_status ba_profile_set_create(ba_profile_set** out);
/* Segments the trace into 5 s windows and appends one 380-d profile per
 * segment. trace_id tags the records. */
ba_status ba_profile_set_add_trace(ba_profile_set* set, const ba_trace* trace,
                                   uint32_t trace_id);
ba_status ba_profile_set_load(const char* path, ba_profile_set** out);
ba_status ba_profile_set_save(const ba_profile_set* set, const char* path);
ba_status ba_profile_set_size(const ba_profile_set* set, size_t* count);
/* values must hold 380 doubles. */
ba_status ba_profile_set_get(const ba_profile_set* set, size_t index,
                             double* values, int* device_label,
                             int* motion_label);
/* Keeps records whose motion is in `motions` (length n_motions); pass
 * include_uncontrolled nonzero to keep uncontrolled profiles as well. */
ba_status ba_profile_set_filter_motions(const ba_profile_set* set,
                                        const int* motions, size_t n_motions,
                                        int include_uncontrolled,
                                        ba_profile_set** out);
void ba_profile_set_free(ba_profile_set* set);

/* --- training ------------------------------------------------------------ */

typedef struct ba_train_config ba_train_config;
typedef struct ba_model ba_model;
typedef struct ba_history ba_history;

#define BA_MODE_ADVERSARIAL 0
#define BA_MODE_BASELINE 1

ba_status ba_train_config_create_default(ba_train_config** out);
ba_status ba_train_config_set_lambda(ba_train_config* config, double lambda);
ba_status ba_train_config_set_learning_rates(ba_train_config* config,
                                             double lr_ep, double lr_d);
ba_status ba_train_config_set_batch_size(ba_train_config* config, int batch);
ba_status ba_train_config_set_epochs(ba_train_config* config, int epochs);
ba_status ba_train_config_set_patience(ba_train_config* config, int patience);
ba_status ba_train_config_set_d_steps(ba_train_config* config, int d_steps);
ba_status ba_train_config_set_seed(ba_train_config* config, uint64_t seed);
void ba_train_config_free(ba_train_config* config);

/* valid_set may be NULL: an internal 15% split then provides the held-out
 * predictor loss. */
ba_status ba_train(const ba_profile_set* train_set,
                   const ba_profile_set* valid_set,
                   const ba_train_config* config, int mode, ba_model** out_model,
                   ba_history** out_history);

ba_status ba_model_save(const ba_model* model, const char* path);
ba_status ba_model_load(const char* path, ba_model** out);
/* profile points at 380 doubles; *p_on is the on-body probability. */
ba_status ba_model_predict(const ba_model* model, const double* profile,
                           double* p_on);
void ba_model_free(ba_model* model);

/* CSV `epoch,loss_p_train,loss_d_train,loss_p_test`. */
ba_status ba_history_csv(const ba_history* history, char** out_csv);
ba_status ba_history_epochs(const ba_history* history, int* epochs);
void ba_history_free(ba_history* history);

/* --- evaluation ----------------------------------------------------------- */

ba_status ba_evaluate_json(const ba_model* model, const ba_profile_set* set,
                           double threshold, char** out_report_json);
ba_status ba_evaluate_roc_csv(const ba_model* model, const ba_profile_set* set,
                              char** out_csv);

/* Leave-one-motion-out comparison of the adversarial and baseline arms. */
ba_status ba_lomo_json(const ba_profile_set* dataset,
                       const ba_train_config* config, const uint64_t* seeds,
                       size_t n_seeds, int threads, char** out_report_json);

/* --- theory certificates --------------------------------------------------- */

ba_status ba_theory_check_json(uint64_t seed, int instances, int nx, int nz,
                               int codomain, const double* lambdas,
                               size_t n_lambdas, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* BODYAUTH_H */
