/* Copyright 2026 The Intentsynth Authors
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

/* C interface to the intentsynth pipeline: synthetic training data for
 * intent detection in zero-resource domains, via zero-shot generation, a
 * trained refinement stage, confidence-based selection baselines, and a
 * downstream evaluation harness.
 *
 * All stateful entry points work on an opaque pipeline handle bound to one
 * configuration and one output directory. Functions return a status code;
 * a human-readable message for the most recent failure is available from
 * intentsynth_last_error() (thread local) or the per-pipeline variant.
 */

#ifndef INTENTSYNTH_H
#define INTENTSYNTH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define INTENTSYNTH_API __declspec(dllexport)
#else
#define INTENTSYNTH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum intentsynth_status {
  INTENTSYNTH_OK = 0,
  INTENTSYNTH_ERR_USAGE = 1,      /* bad arguments, config, or input data */
  INTENTSYNTH_ERR_DEPENDENCY = 2, /* a required stage has not run yet */
  INTENTSYNTH_ERR_BACKEND = 3,    /* a backend call failed or lacks a capability */
  INTENTSYNTH_ERR_INTERNAL = 4
} intentsynth_status;

typedef struct intentsynth_pipeline intentsynth_pipeline;

INTENTSYNTH_API const char* intentsynth_version(void);

/* Message for the most recent failing call on this thread ("" if none). */
INTENTSYNTH_API const char* intentsynth_last_error(void);

/* Creates a pipeline from a JSON config file on disk. */
INTENTSYNTH_API intentsynth_status
intentsynth_pipeline_open(const char* config_path, intentsynth_pipeline** out);

/* Creates a pipeline from an in-memory JSON config string. */
INTENTSYNTH_API intentsynth_status
intentsynth_pipeline_open_json(const char* config_json, intentsynth_pipeline** out);

/* Overrides a config field. Keys: dataset, data_path, trials, strategies
 * (comma separated), multiplier, seed, out, resume (true/false),
 * plots (true/false). */
INTENTSYNTH_API intentsynth_status intentsynth_pipeline_set_option(
    intentsynth_pipeline* pipeline, const char* key, const char* value);

/* Runs one stage: split, generate, refine, select, evaluate, or report. */
INTENTSYNTH_API intentsynth_status
intentsynth_pipeline_run_stage(intentsynth_pipeline* pipeline, const char* stage);

/* Message for the most recent failing call on this pipeline ("" if none). */
INTENTSYNTH_API const char*
intentsynth_pipeline_last_error(const intentsynth_pipeline* pipeline);

/* Formatted results table; non-empty after the report stage ran. */
INTENTSYNTH_API const char*
intentsynth_pipeline_report_text(const intentsynth_pipeline* pipeline);

INTENTSYNTH_API void intentsynth_pipeline_close(intentsynth_pipeline* pipeline);

/* --- stateless helpers ------------------------------------------------- */

/* Geometric mean of token probabilities (log-space; safe for long texts). */
INTENTSYNTH_API intentsynth_status intentsynth_supergen_score(
    const double* token_probabilities, size_t n_tokens, double* score_out);

/* One-tailed paired t-test of mean(a) > mean(b); n >= 2. */
INTENTSYNTH_API intentsynth_status intentsynth_paired_t_test(
    const double* a, const double* b, size_t n, double alpha, double* t_out,
    double* p_out, int* significant_out);

/* Mean distinct-n over per-intent documents given as JSON:
 * {"intent": ["utterance", ...], ...} */
INTENTSYNTH_API intentsynth_status intentsynth_distinct_n(
    const char* documents_json, int n, double* value_out);

#ifdef __cplusplus
}
#endif

#endif /* INTENTSYNTH_H */
