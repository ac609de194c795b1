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

#include <adaopt/adaopt.h>

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/harness.hpp"
#include "core/noise.hpp"
#include "core/objectives.hpp"
#include "core/optimizer.hpp"

#ifndef ADAOPT_VERSION_STRING
#define ADAOPT_VERSION_STRING "0.0.0"
#endif

struct adaopt_objective {
    std::shared_ptr<const adaopt::objectives::Objective> impl;
};

struct adaopt_run {
    adaopt::optimizer::RunRecord rec;
};

struct adaopt_experiment {
    adaopt::harness::ExperimentResult res;
};

namespace {

thread_local std::string g_last_error;

adaopt_status code_to_status(adaopt::ErrorCode code) {
    using adaopt::ErrorCode;
    switch (code) {
        case ErrorCode::InvalidArgument:
            return ADAOPT_ERR_INVALID_ARGUMENT;
        case ErrorCode::DimensionMismatch:
            return ADAOPT_ERR_DIMENSION_MISMATCH;
        case ErrorCode::DivisionByZero:
            return ADAOPT_ERR_DIVISION_BY_ZERO;
        case ErrorCode::NegativeEntry:
            return ADAOPT_ERR_NEGATIVE_ENTRY;
        case ErrorCode::NonFiniteInput:
            return ADAOPT_ERR_NON_FINITE_INPUT;
        case ErrorCode::NonFiniteState:
            return ADAOPT_ERR_NON_FINITE_STATE;
        case ErrorCode::InsufficientHistory:
            return ADAOPT_ERR_INSUFFICIENT_HISTORY;
        case ErrorCode::NotACriticalPoint:
            return ADAOPT_ERR_NOT_A_CRITICAL_POINT;
        case ErrorCode::ConfigError:
            return ADAOPT_ERR_CONFIG;
        case ErrorCode::IoError:
            return ADAOPT_ERR_IO;
        case ErrorCode::ExperimentFailure:
            return ADAOPT_ERR_EXPERIMENT;
    }
    return ADAOPT_ERR_UNKNOWN;
}

template <typename Fn>
adaopt_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        g_last_error.clear();
        return ADAOPT_OK;
    } catch (const adaopt::Error& e) {
        g_last_error = e.what();
        return code_to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return ADAOPT_ERR_OUT_OF_MEMORY;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ADAOPT_ERR_UNKNOWN;
    } catch (...) {
        g_last_error = "unknown error";
        return ADAOPT_ERR_UNKNOWN;
    }
}

void require_ptr(const void* p, const char* what) {
    if (p == nullptr) {
        throw adaopt::InvalidArgument(std::string(what) + " must not be NULL");
    }
}

adaopt::Vec to_vec(const double* data, int dim, const char* what) {
    require_ptr(data, what);
    if (dim < 1) throw adaopt::InvalidArgument("dim must be >= 1");
    return adaopt::Vec(data, data + dim);
}

void copy_out(const adaopt::Vec& v, double* out, int dim, const char* what) {
    require_ptr(out, what);
    if (static_cast<std::size_t>(dim) != v.size()) {
        throw adaopt::DimensionMismatch("caller buffer holds " + std::to_string(dim) +
                                        " entries, result has " + std::to_string(v.size()));
    }
    std::memcpy(out, v.data(), v.size() * sizeof(double));
}

}  // namespace

extern "C" {

const char* adaopt_version(void) { return ADAOPT_VERSION_STRING; }

const char* adaopt_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------------------------------------------ */
/* objectives                                                          */
/* ------------------------------------------------------------------ */

adaopt_status adaopt_objective_create_quadratic(int dim, double center, double curvature,
                                                adaopt_objective** out) {
    return guarded([&] {
        require_ptr(out, "out");
        auto handle = std::make_unique<adaopt_objective>();
        handle->impl = adaopt::objectives::quadratic_objective(dim, center, curvature);
        *out = handle.release();
    });
}

adaopt_status adaopt_objective_create_saddle(adaopt_objective** out) {
    return guarded([&] {
        require_ptr(out, "out");
        auto handle = std::make_unique<adaopt_objective>();
        handle->impl = adaopt::objectives::saddle_objective();
        *out = handle.release();
    });
}

int adaopt_objective_dim(const adaopt_objective* obj) {
    return obj != nullptr ? obj->impl->dim() : 0;
}

adaopt_status adaopt_objective_value(const adaopt_objective* obj, const double* theta, int dim,
                                     double* out) {
    return guarded([&] {
        require_ptr(obj, "obj");
        require_ptr(out, "out");
        const adaopt::Vec t = to_vec(theta, dim, "theta");
        *out = obj->impl->value(t);
    });
}

adaopt_status adaopt_objective_gradient(const adaopt_objective* obj, const double* theta,
                                        int dim, double* grad) {
    return guarded([&] {
        require_ptr(obj, "obj");
        require_ptr(grad, "grad");
        const adaopt::Vec t = to_vec(theta, dim, "theta");
        const adaopt::Vec g = obj->impl->gradient(t);
        copy_out(g, grad, dim, "grad");
    });
}

void adaopt_objective_destroy(adaopt_objective* obj) { delete obj; }

/* ------------------------------------------------------------------ */
/* numeric kernel                                                      */
/* ------------------------------------------------------------------ */

adaopt_status adaopt_step(double* theta, double* w, const double* g, int dim, double gamma,
                          double p, double q, double eps) {
    return guarded([&] {
        require_ptr(theta, "theta");
        require_ptr(w, "w");
        adaopt::optimizer::ParamState state;
        state.theta = to_vec(theta, dim, "theta");
        state.w = to_vec(w, dim, "w");
        state.n = 0;
        const adaopt::Vec grad = to_vec(g, dim, "g");
        const adaopt::optimizer::ParamState next =
            adaopt::optimizer::step(state, grad, gamma, p, q, eps);
        std::memcpy(theta, next.theta.data(), next.theta.size() * sizeof(double));
        std::memcpy(w, next.w.data(), next.w.size() * sizeof(double));
    });
}

/* ------------------------------------------------------------------ */
/* single runs                                                         */
/* ------------------------------------------------------------------ */

adaopt_status adaopt_run_constant(const adaopt_objective* obj, double gamma, double p,
                                  double q, double sigma_sq, double eps, const double* theta0,
                                  const double* w0, int dim, int64_t n_steps, uint64_t seed,
                                  adaopt_run** out) {
    return guarded([&] {
        require_ptr(obj, "obj");
        require_ptr(out, "out");
        const adaopt::Vec t0 = to_vec(theta0, dim, "theta0");
        const adaopt::Vec v0 = to_vec(w0, dim, "w0");
        const adaopt::noise::NoiseModel model =
            adaopt::noise::NoiseModel::isotropic(obj->impl->dim(), false);
        auto handle = std::make_unique<adaopt_run>();
        handle->rec = adaopt::optimizer::run_constant(*obj->impl, gamma, p, q, sigma_sq, eps,
                                                      t0, v0, n_steps, seed, model);
        *out = handle.release();
    });
}

int adaopt_run_diverged(const adaopt_run* run) {
    return run != nullptr && run->rec.diverged ? 1 : 0;
}

int64_t adaopt_run_steps_completed(const adaopt_run* run) {
    return run != nullptr ? run->rec.steps_completed : 0;
}

adaopt_status adaopt_run_theta_final(const adaopt_run* run, double* theta, int dim) {
    return guarded([&] {
        require_ptr(run, "run");
        copy_out(run->rec.theta_final, theta, dim, "theta");
    });
}

adaopt_status adaopt_run_w_final(const adaopt_run* run, double* w, int dim) {
    return guarded([&] {
        require_ptr(run, "run");
        copy_out(run->rec.w_final, w, dim, "w");
    });
}

adaopt_status adaopt_run_f_final(const adaopt_run* run, double* out) {
    return guarded([&] {
        require_ptr(run, "run");
        require_ptr(out, "out");
        *out = run->rec.f_final;
    });
}

adaopt_status adaopt_run_grad_norm_final(const adaopt_run* run, double* out) {
    return guarded([&] {
        require_ptr(run, "run");
        require_ptr(out, "out");
        *out = run->rec.grad_norm_final;
    });
}

adaopt_status adaopt_run_w_norm_final(const adaopt_run* run, double* out) {
    return guarded([&] {
        require_ptr(run, "run");
        require_ptr(out, "out");
        *out = run->rec.w_norm_final;
    });
}

adaopt_status adaopt_run_rate_metric(const adaopt_run* run, double* out) {
    return guarded([&] {
        require_ptr(run, "run");
        require_ptr(out, "out");
        *out = adaopt::diagnostics::rate_metric(run->rec);
    });
}

void adaopt_run_destroy(adaopt_run* run) { delete run; }

/* ------------------------------------------------------------------ */
/* experiments                                                         */
/* ------------------------------------------------------------------ */

adaopt_status adaopt_experiment_run(const char* kind, const char* config_json,
                                    const char* out_dir, int seeds_override,
                                    int workers_override, int override_assumptions,
                                    adaopt_experiment** out) {
    return guarded([&] {
        require_ptr(kind, "kind");
        require_ptr(out, "out");
        const adaopt::harness::ExperimentKind k = adaopt::harness::kind_from_name(kind);
        const std::string text =
            (config_json == nullptr || config_json[0] == '\0') ? "{}" : config_json;
        adaopt::harness::ExperimentConfig cfg = adaopt::harness::parse_config(text, k);
        if (out_dir != nullptr && out_dir[0] != '\0') cfg.out_dir = out_dir;
        if (seeds_override > 0) cfg.seeds = seeds_override;
        if (workers_override > 0) cfg.workers = workers_override;
        if (override_assumptions != 0) cfg.override_assumptions = true;
        auto handle = std::make_unique<adaopt_experiment>();
        handle->res = adaopt::harness::run_experiment(cfg);
        *out = handle.release();
    });
}

const char* adaopt_experiment_report_text(const adaopt_experiment* exp) {
    return exp != nullptr ? exp->res.report_text.c_str() : "";
}

const char* adaopt_experiment_summary_json(const adaopt_experiment* exp) {
    return exp != nullptr ? exp->res.summary_json.c_str() : "";
}

const char* adaopt_experiment_csv_text(const adaopt_experiment* exp) {
    return exp != nullptr ? exp->res.csv_text.c_str() : "";
}

const char* adaopt_experiment_config_hash(const adaopt_experiment* exp) {
    return exp != nullptr ? exp->res.config_hash.c_str() : "";
}

void adaopt_experiment_destroy(adaopt_experiment* exp) { delete exp; }

}  // extern "C"
