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

#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "rng.hpp"

namespace adaopt {
namespace diagnostics {

namespace {

/// Evaluates the limit field with a reusable gradient buffer.
struct FieldWork {
    const objectives::Objective& obj;
    double p_inf;
    double q_inf;
    double eps;
    Vec grad;

    FieldWork(const objectives::Objective& o, double p, double q, double e)
        : obj(o), p_inf(p), q_inf(q), eps(e), grad(static_cast<std::size_t>(o.dim())) {}

    void eval(const Vec& th, const Vec& w, Vec& dth, Vec& dw) {
        obj.gradient_into(th, grad);
        for (std::size_t i = 0; i < th.size(); ++i) {
            const double shifted = w[i] + eps;
            if (!(shifted > 0.0)) {
                throw NonFiniteState("flow left the admissible region (w + eps <= 0)");
            }
            dth[i] = -grad[i] / std::sqrt(shifted);
            dw[i] = p_inf * grad[i] * grad[i] - q_inf * w[i];
        }
    }
};

/// Advances (th, w) by time dt with classical RK4 at step <= h, in place.
void rk4_advance(FieldWork& fw, Vec& th, Vec& w, double dt, double h) {
    if (dt <= 0.0) return;
    const std::int64_t steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(dt / h)));
    const double hh = dt / static_cast<double>(steps);
    const std::size_t d = th.size();
    Vec k1t(d), k1w(d), k2t(d), k2w(d), k3t(d), k3w(d), k4t(d), k4w(d), tt(d), tw(d);
    for (std::int64_t s = 0; s < steps; ++s) {
        fw.eval(th, w, k1t, k1w);
        for (std::size_t i = 0; i < d; ++i) {
            tt[i] = th[i] + 0.5 * hh * k1t[i];
            tw[i] = w[i] + 0.5 * hh * k1w[i];
        }
        fw.eval(tt, tw, k2t, k2w);
        for (std::size_t i = 0; i < d; ++i) {
            tt[i] = th[i] + 0.5 * hh * k2t[i];
            tw[i] = w[i] + 0.5 * hh * k2w[i];
        }
        fw.eval(tt, tw, k3t, k3w);
        for (std::size_t i = 0; i < d; ++i) {
            tt[i] = th[i] + hh * k3t[i];
            tw[i] = w[i] + hh * k3w[i];
        }
        fw.eval(tt, tw, k4t, k4w);
        for (std::size_t i = 0; i < d; ++i) {
            th[i] += hh / 6.0 * (k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i]);
            w[i] += hh / 6.0 * (k1w[i] + 2.0 * k2w[i] + 2.0 * k3w[i] + k4w[i]);
        }
        if (!coordwise::all_finite(th) || !coordwise::all_finite(w)) {
            throw NonFiniteState("flow integration produced a non-finite state");
        }
    }
}

}  // namespace

double rate_metric(const optimizer::RunRecord& rec, std::int64_t n) {
    const std::vector<double>& dense = rec.grad_l1sq_steps;
    if (n < 0) n = static_cast<std::int64_t>(dense.size());
    if (n < 1) {
        throw InvalidArgument("rate_metric: need at least one post-update state");
    }
    if (static_cast<std::int64_t>(dense.size()) < n) {
        throw InsufficientHistory("rate_metric: record holds " + std::to_string(dense.size()) +
                                  " dense entries, need " + std::to_string(n));
    }
    double acc = 0.0;
    for (std::int64_t k = 0; k < n; ++k) acc += dense[static_cast<std::size_t>(k)];
    return acc / static_cast<double>(n);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw DimensionMismatch("log_log_slope: x and y lengths differ");
    }
    if (x.size() < 2) {
        throw InvalidArgument("log_log_slope: need at least two points");
    }
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw InvalidArgument("log_log_slope: entries must be strictly positive");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw InvalidArgument("log_log_slope: abscissae must not be all equal");
    }
    return sxy / sxx;
}

std::vector<InequalityReport> descent_check(const objectives::Objective& obj,
                                            const schedules::ScheduleSet& set,
                                            const noise::NoiseModel& model, const Vec& theta,
                                            const Vec& w, std::int64_t n, int n_mc,
                                            std::uint64_t seed, double tol_se) {
    const int d = obj.dim();
    if (static_cast<int>(theta.size()) != d || static_cast<int>(w.size()) != d) {
        throw DimensionMismatch("descent_check: state length must equal the objective dimension");
    }
    if (model.dim() != d) {
        throw DimensionMismatch("descent_check: noise model dimension mismatch");
    }
    if (n < 0) throw InvalidArgument("descent_check: state index must be >= 0");
    if (n_mc < 2) throw InvalidArgument("descent_check: need n_mc >= 2");
    coordwise::require_finite(theta, "descent_check theta");
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] >= 0.0)) {
            throw NegativeEntry("descent_check: negative scaling at index " + std::to_string(i));
        }
    }

    const double eps = set.eps;
    const double gamma = set.gamma.value(n + 1);
    const double p = set.p.value(n);
    const double q = set.q.value(n);
    const double sigma = set.sigma.value(n + 1);

    const double f = obj.value(theta);
    Vec grad(static_cast<std::size_t>(d));
    obj.gradient_into(theta, grad);

    double sum_w_eps = 0.0, sum_w = 0.0, gsq = 0.0, precond = 0.0;
    for (int i = 0; i < d; ++i) {
        sum_w_eps += w[i] + eps;
        sum_w += w[i];
        gsq += grad[i] * grad[i];
        precond += grad[i] * grad[i] / std::sqrt(w[i] + eps);
    }

    const double rhs_drift =
        sum_w_eps - gamma * q * sum_w + gamma * p * gsq + gamma * p * sigma * sigma * (d + f);
    const double c_eps =
        obj.lipschitz() * obj.lipschitz() * std::max(1.0, obj.growth_cf()) / eps;
    const double rhs_descent = f * (1.0 + c_eps * gamma * gamma) +
                               c_eps * d * gamma * gamma * sigma * sigma - gamma * precond;

    RngStream rng(seed);
    Vec zeta(static_cast<std::size_t>(d));
    Vec g(static_cast<std::size_t>(d));
    Vec th2(static_cast<std::size_t>(d));
    double sum_x = 0.0, sumsq_x = 0.0;  // scaling drift samples
    double sum_y = 0.0, sumsq_y = 0.0;  // objective descent samples
    for (int j = 0; j < n_mc; ++j) {
        if (sigma != 0.0) {
            model.sample(zeta, rng, f);
            for (int i = 0; i < d; ++i) g[i] = grad[i] + sigma * zeta[i];
        } else {
            g = grad;
        }
        double x = 0.0;
        for (int i = 0; i < d; ++i) {
            x += w[i] + gamma * (p * g[i] * g[i] - q * w[i]) + eps;
            th2[i] = theta[i] - gamma * g[i] / std::sqrt(w[i] + eps);
        }
        const double y = obj.value(th2);
        sum_x += x;
        sumsq_x += x * x;
        sum_y += y;
        sumsq_y += y * y;
    }

    auto make_report = [&](const char* name, double sum, double sumsq, double rhs) {
        InequalityReport rep;
        rep.name = name;
        rep.n_mc = n_mc;
        rep.rhs = rhs;
        rep.lhs = sum / static_cast<double>(n_mc);
        const double var =
            std::max(0.0, (sumsq - static_cast<double>(n_mc) * rep.lhs * rep.lhs) /
                              static_cast<double>(n_mc - 1));
        rep.se = std::sqrt(var / static_cast<double>(n_mc));
        if (rep.se > 0.0) {
            rep.margin_se = (rep.rhs - rep.lhs) / rep.se;
            rep.pass = rep.lhs <= rep.rhs + tol_se * rep.se;
        } else {
            const double inf = std::numeric_limits<double>::infinity();
            rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-12) + 1e-12;
            rep.margin_se = rep.pass ? inf : -inf;
        }
        return rep;
    };

    std::vector<InequalityReport> out;
    out.push_back(make_report("scaling_drift", sum_x, sumsq_x, rhs_drift));
    out.push_back(make_report("objective_descent", sum_y, sumsq_y, rhs_descent));
    return out;
}

FieldValue vector_field(const objectives::Objective& obj, const Vec& theta, const Vec& w,
                        double p_inf, double q_inf, double eps) {
    const int d = obj.dim();
    if (static_cast<int>(theta.size()) != d || static_cast<int>(w.size()) != d) {
        throw DimensionMismatch("vector_field: state length must equal the objective dimension");
    }
    if (!(eps > 0.0)) throw InvalidArgument("vector_field: eps must be > 0");
    if (!(p_inf >= 0.0) || !(q_inf > 0.0)) {
        throw InvalidArgument("vector_field: need p_inf >= 0 and q_inf > 0");
    }
    FieldValue out;
    out.dtheta.resize(static_cast<std::size_t>(d));
    out.dw.resize(static_cast<std::size_t>(d));
    FieldWork fw(obj, p_inf, q_inf, eps);
    fw.eval(theta, w, out.dtheta, out.dw);
    return out;
}

FlowPoint flow(const objectives::Objective& obj, const Vec& theta0, const Vec& w0, double p_inf,
               double q_inf, double eps, double t, double h) {
    const int d = obj.dim();
    if (static_cast<int>(theta0.size()) != d || static_cast<int>(w0.size()) != d) {
        throw DimensionMismatch("flow: state length must equal the objective dimension");
    }
    if (!(eps > 0.0)) throw InvalidArgument("flow: eps must be > 0");
    if (!(p_inf >= 0.0) || !(q_inf > 0.0)) {
        throw InvalidArgument("flow: need p_inf >= 0 and q_inf > 0");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("flow: t must be finite and >= 0");
    if (!(h > 0.0)) throw InvalidArgument("flow: h must be > 0");
    FlowPoint out{theta0, w0};
    FieldWork fw(obj, p_inf, q_inf, eps);
    rk4_advance(fw, out.theta, out.w, t, h);
    return out;
}

double apt_deviation(const objectives::Objective& obj, const schedules::ScheduleSet& set,
                     const optimizer::RunRecord& rec, double t_start, double T, double h) {
    const int d = obj.dim();
    if (!(T >= 0.0)) throw InvalidArgument("apt_deviation: T must be >= 0");
    if (!(t_start >= 0.0)) throw InvalidArgument("apt_deviation: t_start must be >= 0");
    if (T == 0.0) return 0.0;  // empty horizon: the flow has not moved yet
    if (!(h > 0.0)) throw InvalidArgument("apt_deviation: h must be > 0");
    const std::size_t dd = static_cast<std::size_t>(d);
    if (rec.theta_steps.empty() || rec.theta_steps.size() % dd != 0 ||
        rec.w_steps.size() != rec.theta_steps.size()) {
        throw InsufficientHistory("apt_deviation: record lacks a dense (theta, w) trajectory");
    }
    const std::size_t n_states = rec.theta_steps.size() / dd;
    if (n_states < 2) {
        throw InsufficientHistory("apt_deviation: trajectory must contain at least one step");
    }

    // Continuous time scale spanned by the recorded steps.
    std::vector<double> tau(n_states);
    tau[0] = 0.0;
    for (std::size_t k = 1; k < n_states; ++k) {
        tau[k] = tau[k - 1] + set.gamma.value(static_cast<std::int64_t>(k));
    }
    if (t_start + T > tau.back() * (1.0 + 1e-12) + 1e-12) {
        throw InsufficientHistory("apt_deviation: trajectory spans time " +
                                  std::to_string(tau.back()) + ", requested up to " +
                                  std::to_string(t_start + T));
    }

    auto interp = [&](double t, Vec& th, Vec& w) {
        if (t >= tau.back()) {
            const std::size_t k = n_states - 1;
            for (std::size_t i = 0; i < dd; ++i) {
                th[i] = rec.theta_steps[k * dd + i];
                w[i] = rec.w_steps[k * dd + i];
            }
            return;
        }
        const std::size_t hi = static_cast<std::size_t>(
            std::upper_bound(tau.begin(), tau.end(), t) - tau.begin());
        const std::size_t k = hi == 0 ? 0 : hi - 1;
        const double span = tau[k + 1] - tau[k];
        const double lam = span > 0.0 ? (t - tau[k]) / span : 0.0;
        for (std::size_t i = 0; i < dd; ++i) {
            th[i] = (1.0 - lam) * rec.theta_steps[k * dd + i] +
                    lam * rec.theta_steps[(k + 1) * dd + i];
            w[i] = (1.0 - lam) * rec.w_steps[k * dd + i] + lam * rec.w_steps[(k + 1) * dd + i];
        }
    };

    // Comparison offsets: every recorded time in (t_start, t_start+T], plus
    // the horizon itself.
    std::vector<double> offsets;
    for (std::size_t k = 0; k < n_states; ++k) {
        const double s = tau[k] - t_start;
        if (s > 1e-15 && s <= T) offsets.push_back(s);
    }
    if (offsets.empty() || T - offsets.back() > 1e-12) offsets.push_back(T);

    Vec th_flow(dd), w_flow(dd), ref_th(dd), ref_w(dd);
    interp(t_start, th_flow, w_flow);
    FieldWork fw(obj, set.p_inf(), set.q.q_inf(), set.eps);
    const double h_base = std::min(h, T / 100.0);

    double sup = 0.0;
    double s_cur = 0.0;
    for (double s : offsets) {
        rk4_advance(fw, th_flow, w_flow, s - s_cur, h_base);
        s_cur = s;
        interp(t_start + s, ref_th, ref_w);
        double dev_sq = 0.0;
        for (std::size_t i = 0; i < dd; ++i) {
            const double dt_i = th_flow[i] - ref_th[i];
            const double dw_i = w_flow[i] - ref_w[i];
            dev_sq += dt_i * dt_i + dw_i * dw_i;
        }
        sup = std::max(sup, std::sqrt(dev_sq));
    }
    return sup;
}

const char* stability_name(Stability s) {
    switch (s) {
        case Stability::Stable:
            return "stable";
        case Stability::Unstable:
            return "unstable";
        case Stability::Degenerate:
        default:
            return "degenerate";
    }
}

EquilibriumReport classify_equilibrium(const objectives::Objective& obj, const Vec& theta_star,
                                       double eps, double q_inf, double tol_grad) {
    const int d = obj.dim();
    if (static_cast<int>(theta_star.size()) != d) {
        throw DimensionMismatch("classify_equilibrium: point length must equal the dimension");
    }
    if (!(eps > 0.0)) throw InvalidArgument("classify_equilibrium: eps must be > 0");
    if (!(q_inf > 0.0)) throw InvalidArgument("classify_equilibrium: q_inf must be > 0");
    if (!(tol_grad >= 0.0)) throw InvalidArgument("classify_equilibrium: tol_grad must be >= 0");

    const Vec grad = obj.gradient(theta_star);
    const double gnorm = coordwise::norm(grad);
    if (gnorm > tol_grad) {
        throw NotACriticalPoint("classify_equilibrium: gradient norm " + std::to_string(gnorm) +
                                " exceeds tolerance " + std::to_string(tol_grad));
    }

    const std::vector<double> hess =
        obj.has_hessian() ? obj.hessian(theta_star) : objectives::fd_hessian(obj, theta_star, 1e-4);
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            m(i, j) = hess[static_cast<std::size_t>(i * d + j)];
        }
    }
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw ExperimentFailure("classify_equilibrium: eigenvalue decomposition failed");
    }

    EquilibriumReport rep;
    rep.hessian_eigenvalues.resize(static_cast<std::size_t>(d));
    double max_abs_eig = 0.0;
    for (int i = 0; i < d; ++i) {
        rep.hessian_eigenvalues[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        max_abs_eig = std::max(max_abs_eig, std::abs(solver.eigenvalues()(i)));
    }

    // Linearization at (theta*, 0): block diag(-Hess/sqrt(eps), -q_inf I).
    const double root_eps = std::sqrt(eps);
    rep.jacobian_eigenvalues.reserve(static_cast<std::size_t>(2 * d));
    for (double lam : rep.hessian_eigenvalues) rep.jacobian_eigenvalues.push_back(-lam / root_eps);
    for (int i = 0; i < d; ++i) rep.jacobian_eigenvalues.push_back(-q_inf);
    std::sort(rep.jacobian_eigenvalues.begin(), rep.jacobian_eigenvalues.end());

    const double tol_eig = 1e-8 * (1.0 + max_abs_eig);
    const double lam_min = rep.hessian_eigenvalues.front();
    if (lam_min < -tol_eig) {
        rep.stability = Stability::Unstable;
    } else if (lam_min > tol_eig) {
        rep.stability = Stability::Stable;
    } else {
        rep.stability = Stability::Degenerate;
    }
    return rep;
}

}  // namespace diagnostics
}  // namespace adaopt
