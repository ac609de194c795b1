/*
 * Copyright 2026 The adaopt Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file adaopt.h
 * @brief C99 interface to the adaopt shared library.
 *
 * Every fallible call returns an adaopt_status; ADAOPT_OK (zero) means
 * success. On failure the thread-local message retrieved through
 * adaopt_last_error() describes what went wrong. Handles returned through
 * out-parameters are owned by the caller and must be released with the
 * matching *_destroy function; destroy functions accept NULL.
 */

#ifndef ADAOPT_ADAOPT_H
#define ADAOPT_ADAOPT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define ADAOPT_API __declspec(dllexport)
#else
#define ADAOPT_API __attribute__((visibility("default")))
#endif

/** Stable status codes; nonzero values mirror the library error categories. */
typedef enum adaopt_status {
    ADAOPT_OK = 0,
    ADAOPT_ERR_INVALID_ARGUMENT = 1,
    ADAOPT_ERR_DIMENSION_MISMATCH = 2,
    ADAOPT_ERR_DIVISION_BY_ZERO = 3,
    ADAOPT_ERR_NEGATIVE_ENTRY = 4,
    ADAOPT_ERR_NON_FINITE_INPUT = 5,
    ADAOPT_ERR_NON_FINITE_STATE = 6,
    ADAOPT_ERR_INSUFFICIENT_HISTORY = 7,
    ADAOPT_ERR_NOT_A_CRITICAL_POINT = 8,
    ADAOPT_ERR_CONFIG = 9,
    ADAOPT_ERR_IO = 10,
    ADAOPT_ERR_EXPERIMENT = 11,
    ADAOPT_ERR_OUT_OF_MEMORY = 12,
    ADAOPT_ERR_UNKNOWN = 13
} adaopt_status;

/** Opaque differentiable objective. */
typedef struct adaopt_objective adaopt_objective;

/** Opaque record of one completed optimization run. */
typedef struct adaopt_run adaopt_run;

/** Opaque result of one completed experiment. */
typedef struct adaopt_experiment adaopt_experiment;

/** @return the library version as "major.minor.patch" (static storage). */
ADAOPT_API const char* adaopt_version(void);

/**
 * @return the message of the most recent failure on the calling thread, or
 *         an empty string when the last call succeeded. The pointer stays
 *         valid until the next adaopt call on the same thread.
 */
ADAOPT_API const char* adaopt_last_error(void);

/* ------------------------------------------------------------------ */
/* objectives                                                          */
/* ------------------------------------------------------------------ */

/**
 * @brief Creates the separable quadratic objective
 *        f(theta) = 1 + (curvature/2) * sum_i (theta_i - center)^2.
 */
ADAOPT_API adaopt_status adaopt_objective_create_quadratic(int dim, double center,
                                                           double curvature,
                                                           adaopt_objective** out);

/** @brief Creates the two-dimensional saddle benchmark objective. */
ADAOPT_API adaopt_status adaopt_objective_create_saddle(adaopt_objective** out);

/** @return the objective's dimension, or 0 when obj is NULL. */
ADAOPT_API int adaopt_objective_dim(const adaopt_objective* obj);

/** @brief Evaluates f(theta); theta must hold dim entries. */
ADAOPT_API adaopt_status adaopt_objective_value(const adaopt_objective* obj,
                                                const double* theta, int dim, double* out);

/** @brief Writes the gradient of f at theta into grad (dim entries each). */
ADAOPT_API adaopt_status adaopt_objective_gradient(const adaopt_objective* obj,
                                                   const double* theta, int dim,
                                                   double* grad);

ADAOPT_API void adaopt_objective_destroy(adaopt_objective* obj);

/* ------------------------------------------------------------------ */
/* numeric kernel                                                      */
/* ------------------------------------------------------------------ */

/**
 * @brief Applies one adaptive update in place:
 *        theta_i -= gamma * g_i / sqrt(w_i + eps), then
 *        w_i += gamma * (p * g_i^2 - q * w_i).
 *
 * Requires eps > 0, gamma * q < 1, finite g, and w_i >= 0; the updated w
 * stays entrywise nonnegative.
 */
ADAOPT_API adaopt_status adaopt_step(double* theta, double* w, const double* g, int dim,
                                     double gamma, double p, double q, double eps);

/* ------------------------------------------------------------------ */
/* single runs                                                         */
/* ------------------------------------------------------------------ */

/**
 * @brief Runs n_steps adaptive updates with constant coefficients and
 *        isotropic Gaussian gradient noise of variance sigma_sq per
 *        coordinate direction scale (sigma_sq >= 0; 0 disables noise).
 *
 * theta0 and w0 must each hold dim entries matching the objective; w0 must
 * be entrywise nonnegative. gamma == 0 freezes the iterate, which is useful
 * as a control.
 */
ADAOPT_API adaopt_status adaopt_run_constant(const adaopt_objective* obj, double gamma,
                                             double p, double q, double sigma_sq, double eps,
                                             const double* theta0, const double* w0, int dim,
                                             int64_t n_steps, uint64_t seed,
                                             adaopt_run** out);

/** @return 1 when the run was aborted on divergence, else 0 (NULL: 0). */
ADAOPT_API int adaopt_run_diverged(const adaopt_run* run);

/** @return the number of completed steps (NULL: 0). */
ADAOPT_API int64_t adaopt_run_steps_completed(const adaopt_run* run);

/** @brief Copies the final iterate into theta (dim entries). */
ADAOPT_API adaopt_status adaopt_run_theta_final(const adaopt_run* run, double* theta,
                                                int dim);

/** @brief Copies the final scaling vector into w (dim entries). */
ADAOPT_API adaopt_status adaopt_run_w_final(const adaopt_run* run, double* w, int dim);

/** @brief Retrieves f(theta_N). */
ADAOPT_API adaopt_status adaopt_run_f_final(const adaopt_run* run, double* out);

/** @brief Retrieves the Euclidean norm of the final gradient. */
ADAOPT_API adaopt_status adaopt_run_grad_norm_final(const adaopt_run* run, double* out);

/** @brief Retrieves the Euclidean norm of the final scaling vector. */
ADAOPT_API adaopt_status adaopt_run_w_norm_final(const adaopt_run* run, double* out);

/** @brief Retrieves the time-average of the squared-l1 gradient metric. */
ADAOPT_API adaopt_status adaopt_run_rate_metric(const adaopt_run* run, double* out);

ADAOPT_API void adaopt_run_destroy(adaopt_run* run);

/* ------------------------------------------------------------------ */
/* experiments                                                         */
/* ------------------------------------------------------------------ */

/**
 * @brief Parses config_json for the named experiment kind ("run",
 *        "rate-study", "trap-study", "equiv-check", or "validate"), runs it,
 *        and returns a handle to the serialized results.
 *
 * config_json may be NULL or empty, which selects the kind's defaults.
 * out_dir, when non-NULL and non-empty, overrides the config's output
 * directory and makes the experiment write <out_dir>/<kind>.csv and .json.
 * seeds_override and workers_override replace the config values when > 0.
 * A nonzero override_assumptions forces schedule-assumption checks off.
 *
 * Configuration problems (unknown keys, out-of-range values, unreadable
 * JSON) return ADAOPT_ERR_CONFIG; runtime failures return other codes.
 */
ADAOPT_API adaopt_status adaopt_experiment_run(const char* kind, const char* config_json,
                                               const char* out_dir, int seeds_override,
                                               int workers_override,
                                               int override_assumptions,
                                               adaopt_experiment** out);

/** @return the experiment's human-readable report (valid until destroy). */
ADAOPT_API const char* adaopt_experiment_report_text(const adaopt_experiment* exp);

/** @return the experiment's JSON summary document (valid until destroy). */
ADAOPT_API const char* adaopt_experiment_summary_json(const adaopt_experiment* exp);

/** @return the experiment's CSV table (valid until destroy). */
ADAOPT_API const char* adaopt_experiment_csv_text(const adaopt_experiment* exp);

/** @return the 16-hex-digit digest of the fully resolved configuration. */
ADAOPT_API const char* adaopt_experiment_config_hash(const adaopt_experiment* exp);

ADAOPT_API void adaopt_experiment_destroy(adaopt_experiment* exp);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ADAOPT_ADAOPT_H */
