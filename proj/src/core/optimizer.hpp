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

#ifndef ADAOPT_CORE_OPTIMIZER_HPP
#define ADAOPT_CORE_OPTIMIZER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coordwise.hpp"
#include "metrics.hpp"
#include "noise.hpp"
#include "objectives.hpp"
#include "rng.hpp"
#include "schedules.hpp"

namespace adaopt {
namespace optimizer {

/// Canonical iterate: position theta_n and per-coordinate scaling w_n.
/// Given w_0 >= 0 and gamma_{n+1} q_n < 1, the scaling stays non-negative
/// at every step (w' = (1 - gamma q) w + gamma p g^2).
struct ParamState {
    Vec theta;
    Vec w;
    std::int64_t n = 0;
};

/// Historical iterate: position and the raw second-moment accumulator v_n
/// evolved by v' = beta2 v + g^2.
struct HistState {
    Vec theta;
    Vec v;
    std::int64_t n = 0;
};

/// Rescaled iterate, equivalent to HistState through w~_n = v_n / S_n.
struct RescaledState {
    Vec theta;
    Vec w_tilde;
    std::int64_t n = 0;
};

/// One canonical update:
///   theta' = theta - gamma * g / sqrt(w + eps)
///   w'     = w + gamma * (p * g^2 - q * w)
/// Requires gamma*q < 1, eps > 0, w >= 0, finite g.
ParamState step(const ParamState& state, const Vec& g, double gamma, double p, double q,
                double eps);

/// One historical update:
///   theta' = theta - alpha * g / sqrt(v + eps~)
///   v'     = beta2 * v + g^2
/// Requires eps~ > 0, 0 < beta2 <= 1, v >= 0, finite g.
HistState step_historical(const HistState& state, const Vec& g, double alpha, double beta2,
                          double eps_tilde);

/// One rescaled update (the historical step rewritten in terms of the
/// normalized accumulator w~ = v / S and a per-step stabilizer eps~/S_n):
///   theta' = theta - alpha~ * g / sqrt(w~ + eps~/S_n)
///   w~'    = w~ + (1/S_{n+1}) * (g^2 - w~)
/// With alpha_{n+1} = alpha~_{n+1} sqrt(S_n) and matching initialization the
/// theta trajectory coincides with the historical one on the same g stream.
RescaledState step_rescaled(const RescaledState& state, const Vec& g, double alpha_tilde,
                            double s_n, double s_np1, double eps_tilde);

/// Seeded trajectory with its diagnostic time series. The thinned series are
/// sampled every `thinning` steps (state 0 and the final state always
/// included); the two series partial sums are accumulated at every step
/// regardless. Wall time is informational and never serialized, so records
/// remain bit-identical across reruns.
struct RunRecord {
    std::uint64_t seed = 0;
    std::string config_digest;  ///< filled by the harness when configured runs are launched

    std::int64_t n_steps = 0;         ///< requested horizon
    std::int64_t steps_completed = 0; ///< equals n_steps unless the run diverged
    int thinning = 1;
    bool diverged = false;
    double w_min_seen = 0.0;  ///< minimum scaling coordinate over the whole run

    std::vector<std::int64_t> step_index;    ///< states n at which series were sampled
    std::vector<double> f_series;            ///< f(theta_n)
    std::vector<double> grad_norm_sq_series; ///< |grad f(theta_n)|^2
    std::vector<double> grad_l1sq_series;    ///< (sum_i |grad_i f(theta_n)|)^2
    std::vector<double> w_norm_series;       ///< Euclidean |w_n|
    std::vector<double> lyapunov_series;     ///< V_{a,b}(theta_n, w_n)
    std::vector<double> sum_grad_series;     ///< partial sum of gamma_{k+1} grad_l1sq at k < n
    std::vector<double> sum_w_series;        ///< partial sum of gamma_{k+1} q_k sum_i w_{k,i}

    /// Dense per-step stationarity values grad_l1sq(grad f(theta_k)) for
    /// k = 1..steps_completed; filled only when requested (rate studies).
    std::vector<double> grad_l1sq_steps;

    /// Dense trajectory (states 0..steps_completed, flattened d per state);
    /// filled only when requested (pseudo-trajectory checks).
    std::vector<double> theta_steps;
    std::vector<double> w_steps;

    Vec theta_final;
    Vec w_final;
    double f_final = 0.0;
    double grad_norm_final = 0.0;    ///< Euclidean |grad f(theta_N)|
    double w_norm_final = 0.0;       ///< Euclidean |w_N|
    double sum_grad_final = 0.0;
    double sum_w_final = 0.0;

    double wall_time_sec = 0.0;  ///< informational only; excluded from serialization
};

/// Options of a schedule-driven run.
struct RunOptions {
    int thinning = 1;
    bool record_dense_grad = false;
    bool record_trajectory = false;
    bool override_assumptions = false;  ///< run despite failed schedule validation
    bool literal_minibatch = false;     ///< average ceil((n+1)^{2s}) draws at scale sigma_1
    double divergence_bound = 1e12;     ///< abort when f or any |theta_i| exceeds this

    /// Optional shared precomputed schedule table (must cover n_steps rows
    /// and match the schedule set); lets many seeds reuse one evaluation.
    const schedules::ScheduleTable* table = nullptr;
};

/// Full seeded run of the canonical iteration with scheduled parameters.
/// Returns a flagged partial record (diverged = true) when the divergence
/// guard trips; throws ConfigError when the schedule set fails validation
/// and no override is given.
RunRecord run(const objectives::Objective& obj, const schedules::ScheduleSet& set,
              const noise::NoiseModel& model, const Vec& theta0, const Vec& w0,
              std::int64_t n_steps, std::uint64_t seed, const RunOptions& opts = {});

/// Finite-horizon run with constant parameters (gamma, p, q, sigma^2); the
/// dense per-step stationarity series is always recorded, making the record
/// directly consumable by the rate metric.
RunRecord run_constant(const objectives::Objective& obj, double gamma, double p, double q,
                       double sigma_sq, double eps, const Vec& theta0, const Vec& w0,
                       std::int64_t n_steps, std::uint64_t seed, const noise::NoiseModel& model,
                       int thinning = 0);

/// Drives the historical and rescaled recursions on one shared gradient
/// stream (sampled along the historical trajectory) and returns the largest
/// Euclidean distance between the two position iterates over the horizon.
double equivalence_max_deviation(const objectives::Objective& obj, const noise::NoiseModel& model,
                                 const schedules::PowerSeq& alpha,
                                 const schedules::Beta2Schedule& b2,
                                 const schedules::PowerSeq& sigma, double eps_tilde,
                                 const Vec& theta0, const Vec& v0, std::int64_t n_steps,
                                 std::uint64_t seed);

}  // namespace optimizer
}  // namespace adaopt

#endif  // ADAOPT_CORE_OPTIMIZER_HPP
