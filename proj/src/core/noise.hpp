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

#ifndef ADAOPT_CORE_NOISE_HPP
#define ADAOPT_CORE_NOISE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coordwise.hpp"
#include "objectives.hpp"
#include "rng.hpp"
#include "schedules.hpp"

namespace adaopt {
namespace noise {

enum class NoiseKind { Isotropic, Elliptic, StateScaled };

/// Zero-mean Gaussian perturbation model for the stochastic gradient oracle
/// g_{n+1} = grad f(theta_n) + sigma_{n+1} * zeta_{n+1}.
///
/// Kinds:
///  - Isotropic: zeta ~ N(0, I_d), or N(0, I_d / d) when normalized so that
///    E|zeta|^2 = 1.
///  - Elliptic: zeta ~ N(0, C) with the smallest eigenvalue of C certified
///    positive at construction; normalization divides C by its trace.
///  - StateScaled: isotropic zeta whose per-coordinate standard deviation is
///    multiplied by sqrt((d + f(theta))/d), giving E|zeta|^2 = d + f(theta)
///    (the position-dependent moment bound with unit constant).
class NoiseModel {
public:
    static NoiseModel isotropic(int dim, bool normalized = false);

    /// Elliptic model with an arbitrary symmetric positive-definite
    /// covariance (row-major d x d).
    static NoiseModel elliptic(int dim, const std::vector<double>& cov_row_major,
                               bool normalized = false);

    /// Elliptic model with covariance diag(1, m, ..., m).
    static NoiseModel elliptic_axis(int dim, double m, bool normalized = false);

    static NoiseModel state_scaled(int dim);

    NoiseKind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool normalized() const { return normalized_; }

    /// Smallest eigenvalue of the effective (possibly normalized) covariance
    /// of zeta; the uniform lower bound on directional second moments. For
    /// the state-scaled kind this is the position-independent floor 1.
    double ellipticity() const { return ellipticity_; }

    /// E|zeta|^2 at a point with objective value f_theta.
    double expected_sq_norm(double f_theta) const;

    /// Draws one zeta into out (length dim()); f_theta is only consulted by
    /// the state-scaled kind.
    void sample(Vec& out, RngStream& rng, double f_theta) const;

    std::string kind_name() const;

private:
    NoiseModel(NoiseKind kind, int dim, bool normalized);

    NoiseKind kind_;
    int dim_;
    bool normalized_;
    double ellipticity_ = 1.0;
    double scale_ = 1.0;                  // per-coordinate factor for isotropic kinds
    std::vector<double> chol_;            // row-major lower Cholesky factor (elliptic)
};

/// Unbiased stochastic gradient at state index n: the analytic gradient plus
/// sigma_{n+1} * zeta. When sigma_{n+1} = 0 the draw is skipped and the
/// exact gradient is returned.
Vec sample_gradient(const objectives::Objective& obj, const Vec& theta, std::int64_t n,
                    const schedules::ScheduleSet& set, const NoiseModel& model, RngStream& rng);

/// Allocation-free variant used by run loops: g receives the sample, scratch
/// must have length dim(). sigma_next is the noise scale already evaluated
/// at n+1; f_theta is the objective value at theta (consulted by the
/// state-scaled kind only; pass 0 otherwise if unknown -- but callers in
/// this library always pass the true value).
void sample_gradient_into(const objectives::Objective& obj, const Vec& theta, double sigma_next,
                          double f_theta, const NoiseModel& model, RngStream& rng, Vec& g,
                          Vec& scratch);

/// Average of batch_size independent samples drawn at the base noise scale
/// sigma_1 (the schedule's coefficient); the effective noise scale is
/// sigma_1 / sqrt(batch_size).
Vec minibatch_gradient(const objectives::Objective& obj, const Vec& theta, std::int64_t n,
                       const schedules::ScheduleSet& set, const NoiseModel& model, RngStream& rng,
                       int batch_size);

/// Growing batch schedule m(n) = ceil(n^(2s)), the batch size that shrinks
/// averaged noise at the same rate as the analytic scale sigma_1 n^-s.
int minibatch_size(std::int64_t n, double s);

}  // namespace noise
}  // namespace adaopt

#endif  // ADAOPT_CORE_NOISE_HPP
