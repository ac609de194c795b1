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

#include <doctest.h>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "core/coordwise.hpp"
#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "core/noise.hpp"
#include "core/objectives.hpp"
#include "core/optimizer.hpp"
#include "core/rng.hpp"
#include "core/schedules.hpp"

using namespace adaopt;
using namespace adaopt::diagnostics;

namespace {

schedules::ScheduleSet reference_set(double sigma1 = 0.1, double eps = 1e-4) {
    return schedules::ScheduleSet(schedules::PowerSeq(0.5, 0.75), schedules::PowerSeq(1.0, 0.5),
                                  schedules::QSeq(1.0), schedules::PowerSeq(sigma1, 0.0), eps);
}

/// Hessian-less saddle used to exercise the finite-difference fallback.
class FdOnlySaddle : public objectives::Objective {
public:
    int dim() const override { return 2; }
    std::string name() const override { return "fd-only-saddle"; }
    double value(const Vec& theta) const override {
        require_dim(theta);
        return 5.0 + theta[0] * theta[0] - theta[1] * theta[1];
    }
    Vec gradient(const Vec& theta) const override {
        require_dim(theta);
        return Vec{2.0 * theta[0], -2.0 * theta[1]};
    }
    double lipschitz() const override { return 2.0; }
    double growth_cf() const override { return 8.0; }
    double f_min() const override { return 1.0; }
    std::vector<objectives::CriticalPoint> critical_points() const override { return {}; }
};

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("grad_l1sq evaluates the squared l1 norm") {
    CHECK(grad_l1sq(Vec{0.0, 0.0, 0.0}) == 0.0);
    CHECK(grad_l1sq(Vec{3.0, -4.0}) == doctest::Approx(49.0));
}

TEST_CASE("lyapunov matches its hand-checked example and bounds") {
    LyapunovParams lp;
    lp.a = 1.0;
    lp.b = 1.0;
    lp.eps = 1.0;
    // d=1, w=3, f=2: (3+1) + 1*4 + 1*2*sqrt(4) = 12.
    CHECK(lyapunov(Vec{3.0}, 2.0, lp) == doctest::Approx(12.0));

    LyapunovParams degenerate;
    degenerate.a = 0.0;
    degenerate.b = 0.0;
    degenerate.eps = 0.5;
    CHECK(lyapunov(Vec{0.0, 0.0, 0.0}, 7.0, degenerate) == doctest::Approx(1.5));  // d*eps

    // V >= d*eps + a*f_min^2 on random states of the quadratic.
    const auto obj = objectives::quadratic_objective(3, 0.0, 2.0);
    const schedules::ScheduleSet set = reference_set();
    const LyapunovParams defaults = LyapunovParams::defaults_for(set);
    CHECK(defaults.b > 2.0 * set.p_sup());
    CHECK(2.0 * defaults.a >= defaults.b * set.p_sup());
    RngStream rng(31, 0);
    for (int i = 0; i < 200; ++i) {
        const Vec theta{rng.normal(), rng.normal(), rng.normal()};
        const Vec w{rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)};
        const double v = lyapunov(theta, w, *obj, defaults);
        CHECK(v >= 3.0 * defaults.eps + defaults.a * obj->f_min() * obj->f_min());
    }
}

TEST_CASE("rate_metric averages the dense stationarity series") {
    const auto obj = objectives::quadratic_objective(2, 0.0, 1.0);
    const noise::NoiseModel model = noise::NoiseModel::isotropic(2);

    SUBCASE("a trajectory pinned at the minimizer scores zero") {
        const optimizer::RunRecord rec = optimizer::run_constant(
            *obj, 0.1, 1.0, 1.0, 0.0, 1e-4, Vec{0.0, 0.0}, Vec{0.0, 0.0}, 100, 1, model);
        CHECK(rate_metric(rec) == 0.0);
    }
    SUBCASE("prefix averaging matches a direct sum") {
        const optimizer::RunRecord rec = optimizer::run_constant(
            *obj, 0.05, 1.0, 1.0, 0.5, 1e-4, Vec{1.0, 1.0}, Vec{0.0, 0.0}, 64, 2, model);
        REQUIRE(rec.grad_l1sq_steps.size() == 64);
        double acc = 0.0;
        for (int k = 0; k < 16; ++k) acc += rec.grad_l1sq_steps[static_cast<std::size_t>(k)];
        CHECK(rate_metric(rec, 16) == doctest::Approx(acc / 16.0));
        CHECK_THROWS_AS(rate_metric(rec, 65), InsufficientHistory);
    }
    SUBCASE("records without dense series are rejected") {
        const schedules::ScheduleSet set = reference_set();
        const optimizer::RunRecord rec =
            optimizer::run(*obj, set, model, Vec{1.0, 1.0}, Vec{0.0, 0.0}, 10, 3, {});
        CHECK_THROWS_AS(rate_metric(rec), InsufficientHistory);
    }
}

TEST_CASE("log_log_slope recovers exact power laws") {
    const std::vector<double> x{100.0, 1000.0, 10000.0};
    std::vector<double> y(3);
    for (std::size_t i = 0; i < 3; ++i) y[i] = 7.0 * std::pow(x[i], -0.5);
    CHECK(log_log_slope(x, y) == doctest::Approx(-0.5).epsilon(1e-12));
    std::vector<double> flat{3.0, 3.0, 3.0};
    CHECK(log_log_slope(x, flat) == doctest::Approx(0.0));
    CHECK_THROWS_AS(log_log_slope(x, std::vector<double>{1.0, 2.0}), DimensionMismatch);
    CHECK_THROWS_AS(log_log_slope(x, std::vector<double>{1.0, -2.0, 3.0}), InvalidArgument);
}

TEST_CASE("descent inequalities hold in the noiseless case") {
    const auto obj = objectives::quadratic_objective(3, 0.0, 1.0);
    const schedules::ScheduleSet set = reference_set(0.0);
    const noise::NoiseModel model = noise::NoiseModel::isotropic(3);
    const Vec theta{1.0, -1.0, 2.0};
    const Vec w{0.5, 0.0, 1.0};
    const auto reports = descent_check(*obj, set, model, theta, w, 5, 1000, 17);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].name == "scaling_drift");
    CHECK(reports[1].name == "objective_descent");
    for (const auto& rep : reports) {
        CHECK(rep.pass);
        CHECK(rep.se == 0.0);  // every noiseless draw is identical
        CHECK(rep.n_mc == 1000);
    }
}

TEST_CASE("descent inequalities hold at randomized noisy states") {
    const auto obj = objectives::quadratic_objective(2, 0.0, 1.0);
    const schedules::ScheduleSet set = reference_set(0.2);
    const noise::NoiseModel model = noise::NoiseModel::isotropic(2);
    RngStream rng(88, 0);
    for (int trial = 0; trial < 5; ++trial) {
        const Vec theta{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const Vec w{rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
        const auto reports =
            descent_check(*obj, set, model, theta, w, 3 + trial, 2000, 100 + trial);
        for (const auto& rep : reports) CHECK(rep.pass);
    }
}

TEST_CASE("vanishing step sizes shrink the one-step slack to zero") {
    const auto obj = objectives::quadratic_objective(2, 0.0, 1.0);
    const schedules::ScheduleSet set = reference_set(0.1);
    const noise::NoiseModel model = noise::NoiseModel::isotropic(2);
    const Vec theta{1.0, 0.5};
    const Vec w{0.3, 0.3};
    const double f = obj->value(theta);
    const auto reports = descent_check(*obj, set, model, theta, w, 10000000, 1000, 7);
    // gamma ~ 2.8e-6 here, so both sides collapse onto f(theta).
    CHECK(std::fabs(reports[1].lhs - f) < 1e-3);
    CHECK(std::fabs(reports[1].rhs - f) < 1e-3);
    CHECK(reports[1].pass);
}

TEST_CASE("vector_field matches the hand-checked example and vanishes at equilibria") {
    const auto obj = objectives::quadratic_objective(1, 0.0, 1.0);
    const FieldValue fv = vector_field(*obj, Vec{1.0}, Vec{0.0}, 0.0, 1.0, 1.0);
    CHECK(fv.dtheta[0] == doctest::Approx(-1.0));
    CHECK(fv.dw[0] == doctest::Approx(0.0));

    const FieldValue eq = vector_field(*obj, Vec{0.0}, Vec{0.0}, 1.0, 1.0, 1e-4);
    CHECK(eq.dtheta[0] == 0.0);
    CHECK(eq.dw[0] == 0.0);

    // With a flat gradient the w-component decays linearly in w.
    const FieldValue lin = vector_field(*obj, Vec{0.0}, Vec{2.0}, 1.0, 1.5, 1e-4);
    CHECK(lin.dw[0] == doctest::Approx(-3.0));
}

TEST_CASE("flow reproduces the exponential w-decay at a critical point") {
    const auto obj = objectives::quadratic_objective(1, 0.0, 1.0);
    const FlowPoint z = flow(*obj, Vec{0.0}, Vec{2.0}, 0.0, 1.5, 1.0, 2.0, 1e-3);
    CHECK(z.theta[0] == 0.0);
    CHECK(std::fabs(z.w[0] - 2.0 * std::exp(-3.0)) < 1e-8);

    // T = 0 is the identity.
    const FlowPoint id = flow(*obj, Vec{0.7}, Vec{0.3}, 1.0, 1.0, 1.0, 0.0, 1e-3);
    CHECK(id.theta[0] == 0.7);
    CHECK(id.w[0] == 0.3);
}

TEST_CASE("flow conserves equilibria of the limit field") {
    const auto saddle = objectives::saddle_objective();
    for (const auto& cp : saddle->critical_points()) {
        const FlowPoint z = flow(*saddle, cp.location, Vec{0.0, 0.0}, 1.0, 1.0, 1e-2, 5.0, 1e-2);
        const Vec dtheta{z.theta[0] - cp.location[0], z.theta[1] - cp.location[1]};
        CHECK(coordwise::norm(dtheta) <= 1e-10);
        CHECK(coordwise::norm(z.w) <= 1e-10);
    }
}

TEST_CASE("flow error falls like h^4 under step halving") {
    const auto obj = objectives::saddle_objective();
    const Vec theta0{0.3, 0.8}, w0{0.1, 0.2};
    auto endpoint = [&](double h) {
        return flow(*obj, theta0, w0, 1.0, 1.0, 0.1, 1.0, h);
    };
    const FlowPoint ref = endpoint(1e-4);
    auto err = [&](const FlowPoint& z) {
        Vec diff(4);
        diff[0] = z.theta[0] - ref.theta[0];
        diff[1] = z.theta[1] - ref.theta[1];
        diff[2] = z.w[0] - ref.w[0];
        diff[3] = z.w[1] - ref.w[1];
        return coordwise::norm(diff);
    };
    const double e1 = err(endpoint(0.05));
    const double e2 = err(endpoint(0.025));
    REQUIRE(e2 > 0.0);
    const double ratio = e1 / e2;
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 32.0);
}

TEST_CASE("classify_equilibrium separates minima from saddles") {
    const auto quad = objectives::quadratic_objective(3, 0.0, 2.0);
    const EquilibriumReport at_min = classify_equilibrium(*quad, Vec{0.0, 0.0, 0.0}, 1e-4, 1.0);
    CHECK(at_min.stability == Stability::Stable);
    REQUIRE(at_min.hessian_eigenvalues.size() == 3);
    CHECK(at_min.hessian_eigenvalues[0] == doctest::Approx(2.0));
    CHECK(std::string(stability_name(at_min.stability)) == "stable");

    const auto saddle = objectives::saddle_objective();
    const EquilibriumReport at_saddle = classify_equilibrium(*saddle, Vec{0.0, 0.0}, 1e-2, 1.0);
    CHECK(at_saddle.stability == Stability::Unstable);
    REQUIRE(at_saddle.hessian_eigenvalues.size() == 2);
    CHECK(at_saddle.hessian_eigenvalues[0] == doctest::Approx(-3.5).epsilon(1e-6));
    CHECK(at_saddle.hessian_eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-6));
    REQUIRE(at_saddle.jacobian_eigenvalues.size() == 4);
    // block-diag(-Hess/sqrt(eps), -q I): eigenvalues {-20, -1, -1, 35}.
    CHECK(at_saddle.jacobian_eigenvalues[0] == doctest::Approx(-20.0).epsilon(1e-6));
    CHECK(at_saddle.jacobian_eigenvalues[3] == doctest::Approx(35.0).epsilon(1e-6));

    const EquilibriumReport at_well =
        classify_equilibrium(*saddle, Vec{0.0, objectives::saddle_ystar()}, 1e-4, 1.0);
    CHECK(at_well.stability == Stability::Stable);
}

TEST_CASE("classification is invariant to eps and q scaling") {
    const auto quad = objectives::quadratic_objective(2, 0.0, 1.5);
    const Vec center{0.0, 0.0};
    for (double eps : {1e-6, 1e-2, 1.0}) {
        for (double q : {0.5, 1.0, 3.0}) {
            CHECK(classify_equilibrium(*quad, center, eps, q).stability == Stability::Stable);
        }
    }
    const auto saddle = objectives::saddle_objective();
    for (double eps : {1e-6, 1e-2, 1.0}) {
        CHECK(classify_equilibrium(*saddle, Vec{0.0, 0.0}, eps, 2.0).stability ==
              Stability::Unstable);
    }
}

TEST_CASE("classify_equilibrium rejects non-critical points") {
    const auto quad = objectives::quadratic_objective(2, 0.0, 1.0);
    CHECK_THROWS_AS(classify_equilibrium(*quad, Vec{1.0, 0.0}, 1e-4, 1.0), NotACriticalPoint);
}

TEST_CASE("finite-difference fallback classifies a hessian-less objective") {
    const FdOnlySaddle obj;
    REQUIRE_FALSE(obj.has_hessian());
    const EquilibriumReport rep = classify_equilibrium(obj, Vec{0.0, 0.0}, 1e-4, 1.0);
    CHECK(rep.stability == Stability::Unstable);
    CHECK(rep.hessian_eigenvalues[0] == doctest::Approx(-2.0).epsilon(1e-5));
    CHECK(rep.hessian_eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("apt_deviation shrinks along a noiseless trajectory") {
    const auto obj = objectives::quadratic_objective(2, 0.0, 1.0);
    const schedules::ScheduleSet set = reference_set(0.0);
    const noise::NoiseModel model = noise::NoiseModel::isotropic(2);
    optimizer::RunOptions opts;
    opts.record_trajectory = true;
    opts.thinning = 0;
    const optimizer::RunRecord rec =
        optimizer::run(*obj, set, model, Vec{1.5, -0.5}, Vec{0.0, 0.0}, 6000, 21, opts);
    REQUIRE_FALSE(rec.diverged);

    CHECK(apt_deviation(*obj, set, rec, 1.0, 0.0) == 0.0);
    const double early = apt_deviation(*obj, set, rec, 1.0, 0.5);
    const double late = apt_deviation(*obj, set, rec, 16.0, 0.5);
    CHECK(late < early);
    CHECK(late < 0.05);

    // Beyond the recorded span the request must fail loudly.
    CHECK_THROWS_AS(apt_deviation(*obj, set, rec, 1e6, 1.0), InsufficientHistory);
}

TEST_CASE("apt_deviation requires a dense trajectory") {
    const auto obj = objectives::quadratic_objective(2, 0.0, 1.0);
    const schedules::ScheduleSet set = reference_set();
    const noise::NoiseModel model = noise::NoiseModel::isotropic(2);
    const optimizer::RunRecord rec =
        optimizer::run(*obj, set, model, Vec{1.0, 1.0}, Vec{0.0, 0.0}, 50, 22, {});
    CHECK_THROWS_AS(apt_deviation(*obj, set, rec, 0.5, 0.5), InsufficientHistory);
}

}  // TEST_SUITE
