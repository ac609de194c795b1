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

#ifndef ADAOPT_CORE_DIAGNOSTICS_HPP
#define ADAOPT_CORE_DIAGNOSTICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coordwise.hpp"
#include "metrics.hpp"
#include "noise.hpp"
#include "objectives.hpp"
#include "optimizer.hpp"
#include "schedules.hpp"

namespace adaopt {
namespace diagnostics {

/// Time-averaged stationarity measure over the first n post-update states:
/// (1/n) sum_{k=1..n} (sum_i |grad_i f(theta_k)|)^2, computed from the dense
/// per-step series of a record. n = -1 uses every recorded step. Throws
/// InsufficientHistory when the record lacks enough dense entries.
double rate_metric(const optimizer::RunRecord& rec, std::int64_t n = -1);

/// Ordinary-least-squares slope of log(y) against log(x); requires matching
/// lengths >= 2 and strictly positive entries.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Outcome of one Monte Carlo test of a conditional one-step inequality
/// lhs = E[...|state] <= rhs. The estimate passes when it does not exceed
/// the bound by more than tol_se standard errors.
struct InequalityReport {
    std::string name;
    double lhs = 0.0;        ///< Monte Carlo estimate of the conditional expectation
    double rhs = 0.0;        ///< closed-form bound evaluated at the state
    double se = 0.0;         ///< standard error of the estimate
    double margin_se = 0.0;  ///< (rhs - lhs)/se; positive means satisfied
    bool pass = false;
    int n_mc = 0;
};

/// Monte Carlo check of the two one-step drift inequalities at a state
/// (theta, w, n):
///   scaling_drift:     E sum_i (w'_i + eps) <= sum_i (w_i + eps)
///                        - gamma q sum_i w_i + gamma p |grad f|^2
///                        + gamma p sigma^2 (d + f)
///   objective_descent: E f(theta') <= f (1 + c_eps gamma^2)
///                        + c_eps d gamma^2 sigma^2
///                        - gamma sum_i (grad_i f)^2 / sqrt(w_i + eps)
/// with c_eps = L^2 max(1, c_f) / eps and (gamma, p, q, sigma) the schedule
/// values consumed by the update from state n. Returns one report per
/// inequality, in the order above.
std::vector<InequalityReport> descent_check(const objectives::Objective& obj,
                                            const schedules::ScheduleSet& set,
                                            const noise::NoiseModel& model, const Vec& theta,
                                            const Vec& w, std::int64_t n, int n_mc,
                                            std::uint64_t seed, double tol_se = 3.0);

/// Value of the autonomous field tracked by the iterates:
///   dtheta_i = -grad_i f(theta) / sqrt(w_i + eps)
///   dw_i     = p_inf grad_i f(theta)^2 - q_inf w_i
struct FieldValue {
    Vec dtheta;
    Vec dw;
};

FieldValue vector_field(const objectives::Objective& obj, const Vec& theta, const Vec& w,
                        double p_inf, double q_inf, double eps);

/// End point of the field's flow after time t from (theta0, w0), integrated
/// with classical fourth-order Runge-Kutta at step ~h (the final step is
/// shortened so the horizon is hit exactly). Throws NonFiniteState if the
/// integration blows up or leaves the admissible region w > -eps.
struct FlowPoint {
    Vec theta;
    Vec w;
};

FlowPoint flow(const objectives::Objective& obj, const Vec& theta0, const Vec& w0, double p_inf,
               double q_inf, double eps, double t, double h);

/// Asymptotic pseudo-trajectory deviation of a recorded run: with the time
/// scale tau_k = gamma_1 + ... + gamma_k, measures
///   sup_s || X(t_start + s) - Phi_s(X(t_start)) ||
/// over the grid {tau_k - t_start} cup {T} intersected with (0, T], where X
/// is the piecewise-linear interpolation of the recorded (theta, w) states
/// and Phi the flow of the limit field (p_inf, q_inf, eps from the set).
/// The record must carry a dense trajectory spanning [t_start, t_start+T].
double apt_deviation(const objectives::Objective& obj, const schedules::ScheduleSet& set,
                     const optimizer::RunRecord& rec, double t_start, double T, double h = 1e-2);

/// Stability of an equilibrium of the limit field. Equilibria are the
/// points (theta*, 0) with grad f(theta*) = 0; the linearization is block
/// diagonal with blocks -Hess f(theta*)/sqrt(eps) and -q_inf I, so the
/// classification is decided by the Hessian spectrum alone.
enum class Stability {
    Stable,      ///< all Hessian eigenvalues positive: attracting
    Unstable,    ///< some Hessian eigenvalue negative: a repelling direction
    Degenerate,  ///< smallest eigenvalue within tolerance of zero
};

struct EquilibriumReport {
    Stability stability = Stability::Degenerate;
    std::vector<double> hessian_eigenvalues;   ///< ascending
    std::vector<double> jacobian_eigenvalues;  ///< ascending, all 2d of them
};

const char* stability_name(Stability s);

/// Classifies the equilibrium (theta_star, 0). Requires
/// |grad f(theta_star)| <= tol_grad (else NotACriticalPoint), eps > 0 and
/// q_inf > 0. Uses the analytic Hessian when the objective provides one and
/// a symmetric finite-difference Hessian (step 1e-4) otherwise. The
/// stability verdict does not depend on eps or q_inf; they only scale the
/// reported Jacobian spectrum.
EquilibriumReport classify_equilibrium(const objectives::Objective& obj, const Vec& theta_star,
                                       double eps, double q_inf, double tol_grad = 1e-8);

}  // namespace diagnostics
}  // namespace adaopt

#endif  // ADAOPT_CORE_DIAGNOSTICS_HPP
