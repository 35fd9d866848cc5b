// Copyright 2026 The casimir-mc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CASIMIR_CASIMIR_H
#define CASIMIR_CASIMIR_H

/*
 * C interface to the casimir Monte Carlo library.
 *
 * Objects are opaque handles created by *_new / *_load functions and released
 * with the matching *_free. Every fallible call returns a casimir_status;
 * on failure casimir_last_error() describes the problem. The message buffer
 * is thread-local and valid until the next failing call on the same thread.
 *
 * Strings returned through char** out-parameters are heap-allocated by the
 * library and must be released with casimir_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CASIMIR_BUILDING_LIBRARY)
#define CASIMIR_API __declspec(dllexport)
#else
#define CASIMIR_API __declspec(dllimport)
#endif
#else
#define CASIMIR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum casimir_status {
    CASIMIR_OK = 0,
    CASIMIR_ERR_VALIDATION = 1,
    CASIMIR_ERR_IO = 2,
    CASIMIR_ERR_SHAPE_MISMATCH = 3,
    CASIMIR_ERR_NON_HERMITIAN = 4,
    CASIMIR_ERR_DEGENERATE_SAMPLE = 5,
    CASIMIR_ERR_UNSUPPORTED_DIMENSION = 6,
    CASIMIR_ERR_AXIS_MISMATCH = 7,
    CASIMIR_ERR_EMPTY_CELL = 8,
    CASIMIR_ERR_INSUFFICIENT_DATA = 9,
    CASIMIR_ERR_DOMAIN = 10,
    CASIMIR_ERR_CONFIG_HASH_MISMATCH = 11,
    CASIMIR_ERR_CORRUPT_CHECKPOINT = 12,
    CASIMIR_ERR_NULL_ARGUMENT = 13,
    CASIMIR_ERR_INTERNAL = 99
} casimir_status;

typedef enum casimir_ci_method {
    CASIMIR_CI_WALD = 0,
    CASIMIR_CI_WILSON = 1
} casimir_ci_method;

typedef struct casimir_ratio {
    double p_hat;
    double ci_lo;
    double ci_hi;
    double level;
    casimir_ci_method method;
} casimir_ratio;

typedef struct casimir_fit_request {
    const char *axis; /* "r_A", "R_B", "c2_A", "c2_B", "c3_B" or "C002" */
    double a;
    double b;
    double lo;
    double hi;
    uint64_t min_total;
} casimir_fit_request;

typedef struct casimir_config casimir_config;
typedef struct casimir_report casimir_report;

typedef void (*casimir_progress_fn)(uint64_t done, uint64_t total, void *user);

CASIMIR_API const char *casimir_version(void);
CASIMIR_API const char *casimir_last_error(void);
CASIMIR_API const char *casimir_status_name(casimir_status status);
CASIMIR_API void casimir_string_free(char *s);

/* Experiment configuration. Defaults: shape 2x3, Hilbert-Schmidt measure,
 * 100 bins, one worker, no output directory. */
CASIMIR_API casimir_status casimir_config_new(casimir_config **out);
CASIMIR_API void casimir_config_free(casimir_config *cfg);
/* Overlays the keys of a JSON config file (or JSON text) onto cfg. */
CASIMIR_API casimir_status casimir_config_load_file(casimir_config *cfg, const char *path);
CASIMIR_API casimir_status casimir_config_merge_json(casimir_config *cfg, const char *json_text);
/* Keeps the measure family; a Hilbert-Schmidt measure follows the new dimension. */
CASIMIR_API casimir_status casimir_config_set_shape(casimir_config *cfg, uint32_t dim_a, uint32_t dim_b);
/* "hs" or "induced:K". */
CASIMIR_API casimir_status casimir_config_set_measure(casimir_config *cfg, const char *measure);
CASIMIR_API casimir_status casimir_config_set_samples(casimir_config *cfg, uint64_t samples);
CASIMIR_API casimir_status casimir_config_set_seed(casimir_config *cfg, uint64_t seed);
CASIMIR_API casimir_status casimir_config_set_bins(casimir_config *cfg, uint32_t bins);
CASIMIR_API casimir_status casimir_config_set_workers(casimir_config *cfg, uint32_t workers);
CASIMIR_API casimir_status casimir_config_set_checkpoint_every(casimir_config *cfg, uint64_t every);
CASIMIR_API casimir_status casimir_config_set_out_dir(casimir_config *cfg, const char *dir);
CASIMIR_API casimir_status casimir_config_set_symmetrize(casimir_config *cfg, int enabled);
CASIMIR_API casimir_status casimir_config_set_flatness_min_total(casimir_config *cfg, uint64_t min_total);
CASIMIR_API casimir_status casimir_config_set_resume(casimir_config *cfg, int enabled);
/* Stop the session after this many new samples (0: run to completion). */
CASIMIR_API casimir_status casimir_config_set_stop_after(casimir_config *cfg, uint64_t samples);
CASIMIR_API casimir_status casimir_config_set_progress(casimir_config *cfg, casimir_progress_fn fn, void *user);
CASIMIR_API casimir_status casimir_config_validate(const casimir_config *cfg);
CASIMIR_API casimir_status casimir_config_to_json(const casimir_config *cfg, char **out);

/* Runs (or resumes) an experiment. With an output directory set, writes a
 * checkpoint after every segment and exports the report on completion. */
CASIMIR_API casimir_status casimir_run(const casimir_config *cfg, casimir_report **out);
/* Rebuilds a report from a checkpoint file without sampling. */
CASIMIR_API casimir_status casimir_report_from_checkpoint(const char *path, casimir_report **out);
CASIMIR_API void casimir_report_free(casimir_report *report);
CASIMIR_API uint64_t casimir_report_n_total(const casimir_report *report);
CASIMIR_API uint64_t casimir_report_n_ppt(const casimir_report *report);
CASIMIR_API int casimir_report_complete(const casimir_report *report);
CASIMIR_API casimir_status casimir_report_overall(const casimir_report *report, double level,
                                                  casimir_ci_method method, casimir_ratio *out);
CASIMIR_API casimir_status casimir_report_flatness(const casimir_report *report, const char *axis, double *chi2,
                                                   uint64_t *dof, double *p_value);
/* include_timing = 0 drops wall-clock fields, giving a reproducible body. */
CASIMIR_API casimir_status casimir_report_to_json(const casimir_report *report, int include_timing, char **out);
CASIMIR_API casimir_status casimir_report_export(const casimir_report *report, const char *out_dir);

/* Flatness tests over every axis CSV in a directory plus optional fits;
 * result as JSON text. */
CASIMIR_API casimir_status casimir_analyze_dir(const char *in_dir, uint64_t min_total,
                                               const casimir_fit_request *fits, size_t n_fits, char **json_out);

CASIMIR_API casimir_status casimir_ratio_with_ci(uint64_t hits, uint64_t total, double level,
                                                 casimir_ci_method method, casimir_ratio *out);
CASIMIR_API casimir_status casimir_formula_p_alpha(double alpha, double tol, double *value, uint64_t *terms);
CASIMIR_API casimir_status casimir_formula_f_term(double alpha, double *value);

/* State-level kernels. Matrices are row-major arrays of interleaved
 * (re, im) doubles, 2 * dim * dim values. */
CASIMIR_API casimir_status casimir_sample_state(uint32_t n, uint32_t k, uint64_t seed, uint64_t index,
                                                double *rho_out);
CASIMIR_API casimir_status casimir_is_ppt(const double *rho, uint32_t dim_a, uint32_t dim_b, double tol, int *ppt,
                                          double *min_eig);
/* Radii and Casimirs of a bipartite state; c3_b is NaN unless dim_b == 3 and
 * c002 is NaN unless the shape is 2x2. */
CASIMIR_API casimir_status casimir_invariants(const double *rho, uint32_t dim_a, uint32_t dim_b, double *r_a,
                                              double *r_b, double *c3_b, double *c002, int *ppt);

#ifdef __cplusplus
}
#endif

#endif /* CASIMIR_CASIMIR_H */
