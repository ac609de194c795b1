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

#ifndef ADAOPT_CORE_METRICS_HPP
#define ADAOPT_CORE_METRICS_HPP

#include <cmath>

#include "coordwise.hpp"
#include "errors.hpp"
#include "objectives.hpp"
#include "schedules.hpp"

namespace adaopt {
namespace diagnostics {

/// Squared 1-norm (sum_i |g_i|)^2 -- the stationarity measure accumulated by
/// the rate metric. Dominates the squared Euclidean norm for every g.
inline double grad_l1sq(const Vec& g) {
    double acc = 0.0;
    for (double x : g) acc += std::abs(x);
    return acc * acc;
}

/// Tuning of the composite energy
///   V_{a,b}(theta, w) = |sqrt(w+eps)|^2 + a f(theta)^2
///                       + b f(theta) |(w+eps)^{1/4}|^2.
/// The drift argument needs b > 2 sup_n p_n and 2a >= b sup_n p_n.
struct LyapunovParams {
    double a = 0.0;
    double b = 0.0;
    double eps = 1e-4;

    /// Minimal tuning satisfying the constraints for a given schedule set:
    /// b = 2 sup p + 1 and a = b sup p / 2 + 1.
    static LyapunovParams defaults_for(const schedules::ScheduleSet& set) {
        LyapunovParams lp;
        const double p_sup = set.p_sup();
        lp.b = 2.0 * p_sup + 1.0;
        lp.a = lp.b * p_sup / 2.0 + 1.0;
        lp.eps = set.eps;
        return lp;
    }
};

/// Composite energy value at (theta, w); requires w >= 0 coordinate-wise.
inline double lyapunov(const Vec& w, double f_theta, const LyapunovParams& lp) {
    return coordwise::sum_plus_eps(w, lp.eps) + lp.a * f_theta * f_theta +
           lp.b * f_theta * coordwise::root_sum(w, lp.eps);
}

inline double lyapunov(const Vec& theta, const Vec& w, const objectives::Objective& obj,
                       const LyapunovParams& lp) {
    return lyapunov(w, obj.value(theta), lp);
}

/// Partial sums of the two almost-surely convergent series: the weighted
/// gradient series sum_k gamma_{k+1} (sum_i |grad_i f(theta_k)|)^2 and the
/// weighted scaling series sum_k gamma_{k+1} q_k sum_i w_{k,i}. Both are
/// non-decreasing by construction.
struct SeriesAccumulators {
    double sum_grad = 0.0;
    double sum_w = 0.0;

    void add_grad(double gamma_next, double grad_l1sq_value) {
        sum_grad += gamma_next * grad_l1sq_value;
    }

    /// w_sum is sum_i w_i (the squared norm of the square-rooted scaling).
    void add_w(double gamma_next, double q, double w_sum) { sum_w += gamma_next * q * w_sum; }
};

}  // namespace diagnostics
}  // namespace adaopt

#endif  // ADAOPT_CORE_METRICS_HPP
