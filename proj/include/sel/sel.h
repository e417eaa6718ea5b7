/*
 * Copyright 2026 The SEL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * sel.h -- public C API of libsel, an event-driven trainer for spiking
 * neural networks that learn conditional instantaneous firing rates.
 *
 * All engine objects are opaque handles. Every function returns a
 * sel_status; on failure, sel_last_error() gives a thread-local detail
 * message. Long-running calls accept an optional progress callback that
 * receives human-readable one-line updates (machine output goes to files).
 */

#ifndef SEL_H
#define SEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SEL_API __declspec(dllexport)
#else
#define SEL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sel_status {
    SEL_OK = 0,
    SEL_ERR_CONFIG = 1,   /* invalid configuration or parameters */
    SEL_ERR_PARSE = 2,    /* malformed file content */
    SEL_ERR_ORDERING = 3, /* event timestamps out of order */
    SEL_ERR_BOUNDS = 4,   /* index or size mismatch */
    SEL_ERR_GAP = 5,      /* non-consecutive timestep pushed */
    SEL_ERR_NUMERIC = 6,  /* non-finite value encountered */
    SEL_ERR_HISTORY = 7,  /* insufficient activity history */
    SEL_ERR_UNDEFINED = 8,/* metric or rate undefined for the input */
    SEL_ERR_IO = 9,       /* file system failure */
    SEL_ERR_INTERNAL = 10
} sel_status;

typedef struct sel_config sel_config; /* resolved run configuration */
typedef struct sel_model sel_model;   /* network weights + architecture */
typedef struct sel_report sel_report; /* flat key -> value metrics */

typedef void (*sel_progress_fn)(const char *line, void *user);

SEL_API const char *sel_version_string(void);
SEL_API const char *sel_status_name(sel_status s);

/* Detail message for the most recent failure on this thread. */
SEL_API const char *sel_last_error(void);

SEL_API void sel_string_free(char *s);

/* ---- configuration ----------------------------------------------------- */

SEL_API sel_status sel_config_create(sel_config **out);
SEL_API sel_status sel_config_load(const char *path, sel_config **out);

/* Override one field by dotted key, e.g. "train.passes" = "3".
 * Unknown keys are rejected with SEL_ERR_CONFIG. */
SEL_API sel_status sel_config_set(sel_config *cfg, const char *dotted_key,
                                  const char *value);

/* Serialize the resolved configuration as JSON (free with sel_string_free). */
SEL_API sel_status sel_config_dump(const sel_config *cfg, char **out_json);

SEL_API void sel_config_destroy(sel_config *cfg);

/* ---- event data -------------------------------------------------------- */

/* Convert between the canonical event formats ("csv" or "bin"; NULL format
 * means detect from the file extension). Reports the event count. */
SEL_API sel_status sel_convert(const char *in_path, const char *in_format,
                               const char *out_path, const char *out_format,
                               uint64_t *out_count);

/* Generate a synthetic moving-pattern dataset (config section "synth")
 * into out_dir: one event file per recording plus manifest.csv. */
SEL_API sel_status sel_synth(const sel_config *cfg, const char *out_dir,
                             sel_progress_fn progress, void *user);

/* ---- training ----------------------------------------------------------- */

/* Run the full training schedule. Writes checkpoints, metrics.csv and
 * manifest.json into out_dir. resume_checkpoint may be NULL. */
SEL_API sel_status sel_train(const sel_config *cfg,
                             const char *resume_checkpoint,
                             const char *out_dir, sel_progress_fn progress,
                             void *user);

/* ---- models ------------------------------------------------------------- */

SEL_API sel_status sel_model_load(const char *path, sel_model **out);
SEL_API sel_status sel_model_save(const sel_model *model, const char *path);
SEL_API void sel_model_destroy(sel_model *model);

SEL_API size_t sel_model_tensor_count(const sel_model *model);
/* Tensor names: "layer1".."layerN", "prediction:input", "prediction:hidden1",
 * ..., "classification:input", ... Returns NULL when idx is out of range. */
SEL_API const char *sel_model_tensor_name(const sel_model *model, size_t idx);

/* Numeric model facts. Keys: "trained_steps", "pass_index", "next_layer",
 * "seed", "delays", "hidden_count", "input_size", "prediction_dt",
 * "dropout_rate", "noise_rate". */
SEL_API sel_status sel_model_get(const sel_model *model, const char *key,
                                 double *out);

/* ---- evaluation, field export, verification ----------------------------- */

/* Evaluate a model on the test split of the configured dataset. Writes
 * eval_summary.csv and eval_series.csv into out_dir and returns a report. */
SEL_API sel_status sel_eval(const sel_model *model, const sel_config *cfg,
                            const char *out_dir, sel_report **out,
                            sel_progress_fn progress, void *user);

/* Export receptive or predictive field maps of one tensor as CSV + PGM.
 * mode: "auto", "receptive" or "predictive". max_maps <= 0 exports all. */
SEL_API sel_status sel_export_fields(const sel_model *model,
                                     const char *tensor, const char *mode,
                                     int normalize, int max_maps,
                                     const char *out_dir);

/* Run the oracle benchmark battery (config section "verify"). Writes
 * report.csv into out_dir; report key "verify.passed" is 1 when every
 * learned rate is within tolerance of its brute-force oracle. */
SEL_API sel_status sel_verify(const sel_config *cfg, const char *out_dir,
                              sel_report **out, sel_progress_fn progress,
                              void *user);

/* ---- reports ------------------------------------------------------------ */

SEL_API size_t sel_report_size(const sel_report *report);
SEL_API const char *sel_report_key(const sel_report *report, size_t idx);
SEL_API sel_status sel_report_get(const sel_report *report, const char *key,
                                  double *out);
SEL_API void sel_report_destroy(sel_report *report);

#ifdef __cplusplus
}
#endif

#endif /* SEL_H */
