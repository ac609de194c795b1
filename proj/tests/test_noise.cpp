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

#include "core/coordwise.hpp"
#include "core/errors.hpp"
#include "core/noise.hpp"
#include "core/objectives.hpp"
#include "core/rng.hpp"
#include "core/schedules.hpp"

using namespace adaopt;
using namespace adaopt::noise;

namespace {

double mc_sq_norm(const NoiseModel& model, double f_theta, int n_draws, std::uint64_t seed) {
    RngStream rng(seed, 0);
    Vec z(static_cast<std::size_t>(model.dim()));
    double acc = 0.0;
    for (int i = 0; i < n_draws; ++i) {
        model.sample(z, rng, f_theta);
        acc += coordwise::norm_sq(z);
    }
    return acc / n_draws;
}

}  // namespace

TEST_SUITE("noise") {

TEST_CASE("isotropic noise has unit per-coordinate variance") {
    const NoiseModel model = NoiseModel::isotropic(4);
    CHECK(model.expected_sq_norm(1.0) == doctest::Approx(4.0));
    CHECK(model.ellipticity() == doctest::Approx(1.0));
    CHECK(mc_sq_norm(model, 1.0, 20000, 11) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("normalized isotropic noise has unit total variance") {
    const NoiseModel model = NoiseModel::isotropic(8, true);
    CHECK(model.expected_sq_norm(1.0) == doctest::Approx(1.0));
    CHECK(mc_sq_norm(model, 1.0, 20000, 12) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("axis-elliptic noise concentrates variance off the first axis") {
    const NoiseModel model = NoiseModel::elliptic_axis(3, 4.0);
    CHECK(model.expected_sq_norm(1.0) == doctest::Approx(9.0));  // 1 + 4 + 4
    CHECK(model.ellipticity() == doctest::Approx(1.0));          // min eig of diag(1,4,4)

    RngStream rng(77, 0);
    Vec z(3);
    double v0 = 0.0, v1 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        model.sample(z, rng, 1.0);
        v0 += z[0] * z[0];
        v1 += z[1] * z[1];
    }
    CHECK(v0 / n == doctest::Approx(1.0).epsilon(0.06));
    CHECK(v1 / n == doctest::Approx(4.0).epsilon(0.06));
}

TEST_CASE("general elliptic noise reproduces a full covariance") {
    // C = [[2, 1], [1, 2]] has eigenvalues 1 and 3.
    const NoiseModel model = NoiseModel::elliptic(2, {2.0, 1.0, 1.0, 2.0});
    CHECK(model.ellipticity() == doctest::Approx(1.0));
    CHECK(model.expected_sq_norm(1.0) == doctest::Approx(4.0));

    RngStream rng(78, 0);
    Vec z(2);
    double cross = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        model.sample(z, rng, 1.0);
        cross += z[0] * z[1];
    }
    CHECK(cross / n == doctest::Approx(1.0).epsilon(0.12));
}

TEST_CASE("indefinite covariance matrices are rejected at construction") {
    // [[1, 2], [2, 1]] has a negative eigenvalue, so no Gaussian has it as
    // a covariance; the certification must fail loudly, not at sample time.
    CHECK_THROWS_AS(NoiseModel::elliptic(2, {1.0, 2.0, 2.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(NoiseModel::elliptic(2, {1.0, 0.0, 1.0}), DimensionMismatch);
}

TEST_CASE("state-scaled noise grows with the objective value") {
    const NoiseModel model = NoiseModel::state_scaled(2);
    CHECK(model.expected_sq_norm(5.0) == doctest::Approx(7.0));  // d + f
    CHECK(mc_sq_norm(model, 5.0, 20000, 13) == doctest::Approx(7.0).epsilon(0.06));
    CHECK(mc_sq_norm(model, 0.0, 20000, 14) == doctest::Approx(2.0).epsilon(0.06));
}

TEST_CASE("noise sampling is deterministic per stream") {
    const NoiseModel model = NoiseModel::isotropic(3);
    RngStream a(99, 5), b(99, 5), c(99, 6);
    Vec za(3), zb(3), zc(3);
    model.sample(za, a, 1.0);
    model.sample(zb, b, 1.0);
    model.sample(zc, c, 1.0);
    CHECK(za == zb);
    CHECK(za != zc);
}

TEST_CASE("sample_gradient reduces to the exact gradient when sigma vanishes") {
    const auto obj = objectives::quadratic_objective(2, 0.0, 1.0);
    const schedules::ScheduleSet set(schedules::PowerSeq(0.5, 0.75), schedules::PowerSeq(1.0, 0.5),
                                     schedules::QSeq(1.0), schedules::PowerSeq(0.0, 0.0), 1e-4);
    const NoiseModel model = NoiseModel::isotropic(2);
    RngStream rng(5, 0);
    const Vec theta{3.0, -1.0};
    const Vec g = sample_gradient(*obj, theta, 1, set, model, rng);
    const Vec exact = obj->gradient(theta);
    CHECK(g[0] == exact[0]);
    CHECK(g[1] == exact[1]);
}

TEST_CASE("minibatch size grows like ceil(n^(2s))") {
    CHECK(minibatch_size(1, 0.0) == 1);
    CHECK(minibatch_size(1000, 0.0) == 1);
    CHECK(minibatch_size(5, 0.5) == 5);   // n^1
    CHECK(minibatch_size(4, 0.25) == 2);  // sqrt(4)
    CHECK(minibatch_size(5, 0.25) == 3);  // ceil(sqrt(5))
}

TEST_CASE("averaged minibatch gradients shrink the noise by 1/m") {
    const auto obj = objectives::quadratic_objective(2, 0.0, 1.0);
    const schedules::ScheduleSet set(schedules::PowerSeq(0.5, 0.75), schedules::PowerSeq(1.0, 0.5),
                                     schedules::QSeq(1.0), schedules::PowerSeq(1.0, 0.0), 1e-4);
    const NoiseModel model = NoiseModel::isotropic(2);
    const Vec theta{0.0, 0.0};  // exact gradient is zero here

    auto mc_var = [&](int batch, std::uint64_t seed) {
        RngStream rng(seed, 0);
        double acc = 0.0;
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            const Vec g = minibatch_gradient(*obj, theta, 1, set, model, rng, batch);
            acc += coordwise::norm_sq(g);
        }
        return acc / n;
    };

    const double v1 = mc_var(1, 21);
    const double v4 = mc_var(4, 22);
    CHECK(v1 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(v4 == doctest::Approx(0.5).epsilon(0.1));
}

}  // TEST_SUITE
