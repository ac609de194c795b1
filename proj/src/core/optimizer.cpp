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

#include "optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace adaopt {
namespace optimizer {

namespace {

double vec_sum(const Vec& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
}

double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void require_nonnegative(const Vec& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0.0)) {
            throw NegativeEntry(std::string(what) + ": negative entry at index " +
                                std::to_string(i));
        }
    }
}

}  // namespace

ParamState step(const ParamState& state, const Vec& g, double gamma, double p, double q,
                double eps) {
    coordwise::require_same_dim(state.theta, state.w, "step");
    coordwise::require_same_dim(state.theta, g, "step");
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw InvalidArgument("step: eps must be finite and > 0");
    }
    if (!(gamma >= 0.0) || !(p >= 0.0) || !(q >= 0.0)) {
        throw InvalidArgument("step: gamma, p, q must be >= 0");
    }
    if (!(gamma * q < 1.0)) {
        throw InvalidArgument("step: gamma*q must be < 1 to keep the scaling non-negative");
    }
    coordwise::require_finite(g, "step gradient");
    require_nonnegative(state.w, "step scaling");

    ParamState out;
    const std::size_t d = state.theta.size();
    out.theta.resize(d);
    out.w.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double denom = std::sqrt(state.w[i] + eps);
        out.theta[i] = state.theta[i] - gamma * g[i] / denom;
        // In exact arithmetic w' = (1 - gamma q) w + gamma p g^2 >= 0 under
        // gamma q < 1; the clamp only absorbs last-ulp rounding.
        double w_next = state.w[i] + gamma * (p * g[i] * g[i] - q * state.w[i]);
        if (w_next < 0.0) w_next = 0.0;
        out.w[i] = w_next;
    }
    out.n = state.n + 1;
    return out;
}

HistState step_historical(const HistState& state, const Vec& g, double alpha, double beta2,
                          double eps_tilde) {
    coordwise::require_same_dim(state.theta, state.v, "step_historical");
    coordwise::require_same_dim(state.theta, g, "step_historical");
    if (!(eps_tilde > 0.0) || !std::isfinite(eps_tilde)) {
        throw InvalidArgument("step_historical: eps~ must be finite and > 0");
    }
    if (!(alpha >= 0.0)) {
        throw InvalidArgument("step_historical: alpha must be >= 0");
    }
    if (!(beta2 > 0.0 && beta2 <= 1.0)) {
        throw InvalidArgument("step_historical: beta2 must lie in (0, 1]");
    }
    coordwise::require_finite(g, "step_historical gradient");
    require_nonnegative(state.v, "step_historical accumulator");

    HistState out;
    const std::size_t d = state.theta.size();
    out.theta.resize(d);
    out.v.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        out.theta[i] = state.theta[i] - alpha * g[i] / std::sqrt(state.v[i] + eps_tilde);
        out.v[i] = beta2 * state.v[i] + g[i] * g[i];
    }
    out.n = state.n + 1;
    return out;
}

RescaledState step_rescaled(const RescaledState& state, const Vec& g, double alpha_tilde,
                            double s_n, double s_np1, double eps_tilde) {
    coordwise::require_same_dim(state.theta, state.w_tilde, "step_rescaled");
    coordwise::require_same_dim(state.theta, g, "step_rescaled");
    if (!(eps_tilde > 0.0) || !std::isfinite(eps_tilde)) {
        throw InvalidArgument("step_rescaled: eps~ must be finite and > 0");
    }
    if (!(alpha_tilde >= 0.0)) {
        throw InvalidArgument("step_rescaled: alpha~ must be >= 0");
    }
    if (!(s_n >= 1.0) || !(s_np1 >= 1.0)) {
        throw InvalidArgument("step_rescaled: normalizers S_n, S_{n+1} must be >= 1");
    }
    coordwise::require_finite(g, "step_rescaled gradient");
    require_nonnegative(state.w_tilde, "step_rescaled scaling");

    RescaledState out;
    const std::size_t d = state.theta.size();
    out.theta.resize(d);
    out.w_tilde.resize(d);
    const double stabilizer = eps_tilde / s_n;
    for (std::size_t i = 0; i < d; ++i) {
        out.theta[i] =
            state.theta[i] - alpha_tilde * g[i] / std::sqrt(state.w_tilde[i] + stabilizer);
        // Convex combination of w~ and g^2 (weight 1/S_{n+1} <= 1): stays
        // non-negative without clamping.
        out.w_tilde[i] = state.w_tilde[i] + (g[i] * g[i] - state.w_tilde[i]) / s_np1;
    }
    out.n = state.n + 1;
    return out;
}

RunRecord run(const objectives::Objective& obj, const schedules::ScheduleSet& set,
              const noise::NoiseModel& model, const Vec& theta0, const Vec& w0,
              std::int64_t n_steps, std::uint64_t seed, const RunOptions& opts) {
    const auto t_start = std::chrono::steady_clock::now();

    const int d = obj.dim();
    if (static_cast<int>(theta0.size()) != d || static_cast<int>(w0.size()) != d) {
        throw DimensionMismatch("run: theta0/w0 length must equal the objective dimension");
    }
    if (model.dim() != d) {
        throw DimensionMismatch("run: noise model dimension must equal the objective dimension");
    }
    if (n_steps < 0) {
        throw InvalidArgument("run: n_steps must be >= 0");
    }
    coordwise::require_finite(theta0, "run theta0");
    coordwise::require_finite(w0, "run w0");
    require_nonnegative(w0, "run w0");

    const ValidationReport assumptions = validate_assumptions(set);
    if (!assumptions.all_pass() && !opts.override_assumptions) {
        std::string failed;
        for (const auto& chk : assumptions.checks) {
            if (!chk.pass) {
                if (!failed.empty()) failed += ", ";
                failed += chk.name;
            }
        }
        throw ConfigError("run: schedule assumptions not satisfied (" + failed +
                          "); pass override_assumptions to run anyway");
    }
    if (opts.table != nullptr &&
        static_cast<std::int64_t>(opts.table->gamma_next.size()) < n_steps) {
        throw InvalidArgument("run: schedule table shorter than the requested horizon");
    }
    // Well-definedness (as opposed to convergence) requirement: the very
    // first (largest) product gamma_{n+1} q_n must stay below one, otherwise
    // the scaling recursion can leave the non-negative orthant.
    if (n_steps > 0) {
        const double gamma1 = opts.table != nullptr ? opts.table->gamma_next[0] : set.gamma.value(1);
        const double q0 = opts.table != nullptr ? opts.table->q[0] : set.q.value(1);
        if (!(gamma1 * q0 < 1.0)) {
            throw ConfigError("run: gamma_1 * q_0 must be < 1");
        }
    }

    const diagnostics::LyapunovParams lp = diagnostics::LyapunovParams::defaults_for(set);
    diagnostics::SeriesAccumulators acc;
    RngStream rng(seed);

    RunRecord rec;
    rec.seed = seed;
    rec.n_steps = n_steps;
    rec.thinning = opts.thinning;
    rec.w_min_seen = std::numeric_limits<double>::infinity();

    const std::size_t n_sampled =
        opts.thinning >= 1 ? static_cast<std::size_t>(n_steps / opts.thinning + 2) : 2u;
    rec.step_index.reserve(n_sampled);
    rec.f_series.reserve(n_sampled);
    rec.grad_norm_sq_series.reserve(n_sampled);
    rec.grad_l1sq_series.reserve(n_sampled);
    rec.w_norm_series.reserve(n_sampled);
    rec.lyapunov_series.reserve(n_sampled);
    rec.sum_grad_series.reserve(n_sampled);
    rec.sum_w_series.reserve(n_sampled);
    if (opts.record_dense_grad) rec.grad_l1sq_steps.reserve(static_cast<std::size_t>(n_steps));
    if (opts.record_trajectory) {
        rec.theta_steps.reserve(static_cast<std::size_t>((n_steps + 1) * d));
        rec.w_steps.reserve(static_cast<std::size_t>((n_steps + 1) * d));
    }

    Vec theta = theta0;
    Vec w = w0;
    Vec g_true(static_cast<std::size_t>(d));
    Vec g(static_cast<std::size_t>(d));
    Vec zeta(static_cast<std::size_t>(d));

    const double sigma1 = set.sigma.coef();
    const double s_exp = set.s();
    const double bound = opts.divergence_bound;

    auto sample_series_row = [&](std::int64_t n, double f_n, double grad_sq, double glsq) {
        rec.step_index.push_back(n);
        rec.f_series.push_back(f_n);
        rec.grad_norm_sq_series.push_back(grad_sq);
        rec.grad_l1sq_series.push_back(glsq);
        rec.w_norm_series.push_back(coordwise::norm(w));
        rec.lyapunov_series.push_back(diagnostics::lyapunov(w, f_n, lp));
        rec.sum_grad_series.push_back(acc.sum_grad);
        rec.sum_w_series.push_back(acc.sum_w);
    };

    std::int64_t n = 0;
    bool diverged = false;
    for (; n < n_steps; ++n) {
        const double f_n = obj.value(theta);
        if (!std::isfinite(f_n) || !coordwise::all_finite(theta) ||
            (bound > 0.0 && (f_n > bound || max_abs(theta) > bound))) {
            diverged = true;
            break;
        }
        obj.gradient_into(theta, g_true);
        const double glsq = diagnostics::grad_l1sq(g_true);

        if (opts.record_dense_grad && n >= 1) rec.grad_l1sq_steps.push_back(glsq);
        if (opts.record_trajectory) {
            rec.theta_steps.insert(rec.theta_steps.end(), theta.begin(), theta.end());
            rec.w_steps.insert(rec.w_steps.end(), w.begin(), w.end());
        }
        for (double wi : w) rec.w_min_seen = std::min(rec.w_min_seen, wi);
        if (n == 0 || (opts.thinning >= 1 && n % opts.thinning == 0)) {
            sample_series_row(n, f_n, coordwise::norm_sq(g_true), glsq);
        }

        double gamma_next, p_n, q_n, sigma_next;
        if (opts.table != nullptr) {
            const std::size_t k = static_cast<std::size_t>(n);
            gamma_next = opts.table->gamma_next[k];
            p_n = opts.table->p[k];
            q_n = opts.table->q[k];
            sigma_next = opts.table->sigma_next[k];
        } else {
            gamma_next = set.gamma.value(n + 1);
            p_n = set.p.value(n);
            q_n = set.q.value(n);
            sigma_next = set.sigma.value(n + 1);
        }

        acc.add_grad(gamma_next, glsq);
        acc.add_w(gamma_next, q_n, vec_sum(w));

        // One oracle call: the analytic gradient perturbed in place.
        if (opts.literal_minibatch) {
            g = g_true;
            if (sigma1 > 0.0) {
                const int m = noise::minibatch_size(n + 1, s_exp);
                const double scale = sigma1 / static_cast<double>(m);
                for (int j = 0; j < m; ++j) {
                    model.sample(zeta, rng, f_n);
                    for (int i = 0; i < d; ++i) g[i] += scale * zeta[i];
                }
            }
        } else {
            g = g_true;
            if (sigma_next != 0.0) {
                model.sample(zeta, rng, f_n);
                for (int i = 0; i < d; ++i) g[i] += sigma_next * zeta[i];
            }
        }

        for (int i = 0; i < d; ++i) {
            const double denom = std::sqrt(w[i] + set.eps);
            theta[i] -= gamma_next * g[i] / denom;
            double w_next = w[i] + gamma_next * (p_n * g[i] * g[i] - q_n * w[i]);
            if (w_next < 0.0) w_next = 0.0;
            w[i] = w_next;
        }
    }

    rec.steps_completed = n;
    rec.diverged = diverged;
    rec.theta_final = theta;
    rec.w_final = w;
    rec.sum_grad_final = acc.sum_grad;
    rec.sum_w_final = acc.sum_w;

    if (!diverged) {
        const double f_fin = obj.value(theta);
        obj.gradient_into(theta, g_true);
        const double glsq = diagnostics::grad_l1sq(g_true);
        if (opts.record_dense_grad && n_steps >= 1) rec.grad_l1sq_steps.push_back(glsq);
        if (opts.record_trajectory) {
            rec.theta_steps.insert(rec.theta_steps.end(), theta.begin(), theta.end());
            rec.w_steps.insert(rec.w_steps.end(), w.begin(), w.end());
        }
        for (double wi : w) rec.w_min_seen = std::min(rec.w_min_seen, wi);
        if (n_steps > 0) {
            sample_series_row(n, f_fin, coordwise::norm_sq(g_true), glsq);
        } else if (rec.step_index.empty()) {
            sample_series_row(0, f_fin, coordwise::norm_sq(g_true), glsq);
        }
        rec.f_final = f_fin;
        rec.grad_norm_final = std::sqrt(coordwise::norm_sq(g_true));
        rec.w_norm_final = coordwise::norm(w);
    } else {
        // Faithful partial record of a blown-up trajectory; derived values
        // that need a finite state are reported as NaN.
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (coordwise::all_finite(theta)) {
            rec.f_final = obj.value(theta);
            obj.gradient_into(theta, g_true);
            rec.grad_norm_final = std::sqrt(coordwise::norm_sq(g_true));
        } else {
            rec.f_final = nan;
            rec.grad_norm_final = nan;
        }
        rec.w_norm_final = coordwise::all_finite(w) ? coordwise::norm(w) : nan;
    }

    if (std::isinf(rec.w_min_seen)) rec.w_min_seen = 0.0;
    rec.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rec;
}

RunRecord run_constant(const objectives::Objective& obj, double gamma, double p, double q,
                       double sigma_sq, double eps, const Vec& theta0, const Vec& w0,
                       std::int64_t n_steps, std::uint64_t seed, const noise::NoiseModel& model,
                       int thinning) {
    if (!(sigma_sq >= 0.0) || !std::isfinite(sigma_sq)) {
        throw InvalidArgument("run_constant: sigma^2 must be finite and >= 0");
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgument("run_constant: gamma must be finite and >= 0");
    }
    RunOptions opts;
    opts.thinning = thinning;
    opts.record_dense_grad = true;
    // Constant parameters are a finite-horizon regime; the asymptotic
    // schedule assumptions intentionally do not apply.
    opts.override_assumptions = true;
    if (gamma > 0.0) {
        const schedules::ScheduleSet set(schedules::PowerSeq(gamma, 0.0),
                                         schedules::PowerSeq(p, 0.0), schedules::QSeq(q),
                                         schedules::PowerSeq(std::sqrt(sigma_sq), 0.0), eps);
        return run(obj, set, model, theta0, w0, n_steps, seed, opts);
    }
    // gamma = 0 freezes the dynamics; the schedule family requires a positive
    // step coefficient, so the zero step is delivered through an explicit
    // per-step table over a placeholder set.
    const schedules::ScheduleSet set(schedules::PowerSeq(1.0, 0.0), schedules::PowerSeq(p, 0.0),
                                     schedules::QSeq(q),
                                     schedules::PowerSeq(std::sqrt(sigma_sq), 0.0), eps);
    schedules::ScheduleTable table;
    const std::size_t rows = static_cast<std::size_t>(n_steps);
    table.gamma_next.assign(rows, 0.0);
    table.p.assign(rows, p);
    table.q.assign(rows, q);
    table.sigma_next.assign(rows, std::sqrt(sigma_sq));
    table.eps = eps;
    opts.table = &table;
    return run(obj, set, model, theta0, w0, n_steps, seed, opts);
}

double equivalence_max_deviation(const objectives::Objective& obj, const noise::NoiseModel& model,
                                 const schedules::PowerSeq& alpha,
                                 const schedules::Beta2Schedule& b2,
                                 const schedules::PowerSeq& sigma, double eps_tilde,
                                 const Vec& theta0, const Vec& v0, std::int64_t n_steps,
                                 std::uint64_t seed) {
    const int d = obj.dim();
    if (static_cast<int>(theta0.size()) != d || static_cast<int>(v0.size()) != d) {
        throw DimensionMismatch(
            "equivalence_max_deviation: theta0/v0 length must equal the objective dimension");
    }
    if (model.dim() != d) {
        throw DimensionMismatch(
            "equivalence_max_deviation: noise model dimension must equal the objective dimension");
    }
    if (n_steps < 0) {
        throw InvalidArgument("equivalence_max_deviation: n_steps must be >= 0");
    }
    coordwise::require_finite(theta0, "equivalence theta0");
    coordwise::require_finite(v0, "equivalence v0");
    require_nonnegative(v0, "equivalence v0");

    HistState hist{theta0, v0, 0};
    RescaledState resc{theta0, v0, 0};  // S_0 = 1, so w~_0 = v_0
    RngStream rng(seed);
    Vec g(static_cast<std::size_t>(d));
    Vec zeta(static_cast<std::size_t>(d));

    double s_n = 1.0;
    double max_dev = 0.0;
    for (std::int64_t n = 0; n < n_steps; ++n) {
        // One gradient sample on the historical trajectory feeds both
        // recursions; in exact arithmetic they coincide.
        const double f_n = obj.value(hist.theta);
        obj.gradient_into(hist.theta, g);
        const double sigma_next = sigma.value(n + 1);
        if (sigma_next != 0.0) {
            model.sample(zeta, rng, f_n);
            for (int i = 0; i < d; ++i) g[i] += sigma_next * zeta[i];
        }

        const double beta2_n = b2.value(n);
        const double s_np1 = beta2_n * s_n + 1.0;
        const double alpha_np1 = alpha.value(n + 1);

        hist = step_historical(hist, g, alpha_np1, beta2_n, eps_tilde);
        resc = step_rescaled(resc, g, alpha_np1 / std::sqrt(s_n), s_n, s_np1, eps_tilde);
        s_n = s_np1;

        double dev_sq = 0.0;
        for (int i = 0; i < d; ++i) {
            const double diff = hist.theta[i] - resc.theta[i];
            dev_sq += diff * diff;
        }
        max_dev = std::max(max_dev, std::sqrt(dev_sq));
    }
    return max_dev;
}

}  // namespace optimizer
}  // namespace adaopt
