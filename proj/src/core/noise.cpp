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

#include "noise.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace adaopt {
namespace noise {

NoiseModel::NoiseModel(NoiseKind kind, int dim, bool normalized)
    : kind_(kind), dim_(dim), normalized_(normalized) {
    if (dim < 1) throw InvalidArgument("NoiseModel: dim must be >= 1");
}

NoiseModel NoiseModel::isotropic(int dim, bool normalized) {
    NoiseModel m(NoiseKind::Isotropic, dim, normalized);
    // Covariance I_d, or I_d / d after trace normalization.
    m.scale_ = normalized ? 1.0 / std::sqrt(static_cast<double>(dim)) : 1.0;
    m.ellipticity_ = m.scale_ * m.scale_;
    return m;
}

NoiseModel NoiseModel::elliptic(int dim, const std::vector<double>& cov_row_major,
                                bool normalized) {
    if (cov_row_major.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {
        throw DimensionMismatch("NoiseModel::elliptic: covariance must be dim x dim");
    }
    Eigen::MatrixXd cov(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            cov(i, j) = cov_row_major[static_cast<std::size_t>(i) * dim + j];
        }
    }
    if (!cov.isApprox(cov.transpose(), 1e-12)) {
        throw InvalidArgument("NoiseModel::elliptic: covariance must be symmetric");
    }
    if (normalized) {
        const double trace = cov.trace();
        if (!(trace > 0.0)) {
            throw InvalidArgument("NoiseModel::elliptic: covariance trace must be > 0");
        }
        cov /= trace;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const double min_eig = es.eigenvalues().minCoeff();
    if (!(min_eig > 0.0)) {
        throw InvalidArgument(
            "NoiseModel::elliptic: covariance must be positive definite (min eigenvalue " +
            std::to_string(min_eig) + ")");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw InvalidArgument("NoiseModel::elliptic: Cholesky factorization failed");
    }
    const Eigen::MatrixXd lower = llt.matrixL();

    NoiseModel m(NoiseKind::Elliptic, dim, normalized);
    m.ellipticity_ = min_eig;
    m.chol_.resize(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            m.chol_[static_cast<std::size_t>(i) * dim + j] = lower(i, j);
        }
    }
    return m;
}

NoiseModel NoiseModel::elliptic_axis(int dim, double m, bool normalized) {
    if (!(m > 0.0)) {
        throw InvalidArgument("NoiseModel::elliptic_axis: m must be > 0");
    }
    std::vector<double> cov(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0);
    cov[0] = 1.0;
    for (int i = 1; i < dim; ++i) cov[static_cast<std::size_t>(i) * dim + i] = m;
    return elliptic(dim, cov, normalized);
}

NoiseModel NoiseModel::state_scaled(int dim) {
    NoiseModel m(NoiseKind::StateScaled, dim, false);
    m.ellipticity_ = 1.0;  // the position-independent floor (multiplier >= 1)
    return m;
}

double NoiseModel::expected_sq_norm(double f_theta) const {
    switch (kind_) {
        case NoiseKind::Isotropic:
            return scale_ * scale_ * dim_;
        case NoiseKind::Elliptic: {
            // trace of the effective covariance = |L|_F^2
            double acc = 0.0;
            for (double x : chol_) acc += x * x;
            return acc;
        }
        case NoiseKind::StateScaled:
        default:
            return static_cast<double>(dim_) + f_theta;
    }
}

void NoiseModel::sample(Vec& out, RngStream& rng, double f_theta) const {
    if (out.size() != static_cast<std::size_t>(dim_)) {
        throw DimensionMismatch("NoiseModel::sample: output length must equal dim");
    }
    switch (kind_) {
        case NoiseKind::Isotropic: {
            for (int i = 0; i < dim_; ++i) out[static_cast<std::size_t>(i)] = scale_ * rng.normal();
            break;
        }
        case NoiseKind::Elliptic: {
            // out = L z with z standard normal; L is lower triangular.
            Vec z(static_cast<std::size_t>(dim_));
            for (int i = 0; i < dim_; ++i) z[static_cast<std::size_t>(i)] = rng.normal();
            for (int i = 0; i < dim_; ++i) {
                double acc = 0.0;
                for (int j = 0; j <= i; ++j) {
                    acc += chol_[static_cast<std::size_t>(i) * dim_ + j] * z[static_cast<std::size_t>(j)];
                }
                out[static_cast<std::size_t>(i)] = acc;
            }
            break;
        }
        case NoiseKind::StateScaled:
        default: {
            const double mult = std::sqrt((static_cast<double>(dim_) + f_theta) /
                                          static_cast<double>(dim_));
            for (int i = 0; i < dim_; ++i) out[static_cast<std::size_t>(i)] = mult * rng.normal();
            break;
        }
    }
}

std::string NoiseModel::kind_name() const {
    switch (kind_) {
        case NoiseKind::Isotropic:
            return "isotropic";
        case NoiseKind::Elliptic:
            return "elliptic";
        case NoiseKind::StateScaled:
        default:
            return "state_scaled";
    }
}

Vec sample_gradient(const objectives::Objective& obj, const Vec& theta, std::int64_t n,
                    const schedules::ScheduleSet& set, const NoiseModel& model, RngStream& rng) {
    coordwise::require_finite(theta, "sample_gradient");
    Vec g(theta.size());
    Vec scratch(theta.size());
    const double sigma_next = set.sigma.value(n + 1);
    sample_gradient_into(obj, theta, sigma_next, obj.value(theta), model, rng, g, scratch);
    return g;
}

void sample_gradient_into(const objectives::Objective& obj, const Vec& theta, double sigma_next,
                          double f_theta, const NoiseModel& model, RngStream& rng, Vec& g,
                          Vec& scratch) {
    obj.gradient_into(theta, g);
    if (sigma_next == 0.0) return;
    model.sample(scratch, rng, f_theta);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += sigma_next * scratch[i];
}

Vec minibatch_gradient(const objectives::Objective& obj, const Vec& theta, std::int64_t n,
                       const schedules::ScheduleSet& set, const NoiseModel& model, RngStream& rng,
                       int batch_size) {
    (void)n;
    if (batch_size < 1) {
        throw InvalidArgument("minibatch_gradient: batch size must be >= 1");
    }
    coordwise::require_finite(theta, "minibatch_gradient");
    const double sigma_base = set.sigma.coef();
    Vec g = obj.gradient(theta);
    if (sigma_base == 0.0) return g;

    const double f_theta = obj.value(theta);
    Vec zeta(theta.size());
    Vec mean_noise(theta.size(), 0.0);
    for (int k = 0; k < batch_size; ++k) {
        model.sample(zeta, rng, f_theta);
        for (std::size_t i = 0; i < zeta.size(); ++i) mean_noise[i] += zeta[i];
    }
    const double inv_m = 1.0 / static_cast<double>(batch_size);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += sigma_base * mean_noise[i] * inv_m;
    return g;
}

int minibatch_size(std::int64_t n, double s) {
    if (n < 1) throw InvalidArgument("minibatch_size: n must be >= 1");
    if (s < 0.0) throw InvalidArgument("minibatch_size: s must be >= 0");
    if (s == 0.0) return 1;
    // The guard keeps an exactly-integer power (e.g. 16^0.5 = 4) from being
    // pushed to the next integer by floating-point round-up.
    const double raw = std::pow(static_cast<double>(n), 2.0 * s);
    const int m = static_cast<int>(std::ceil(raw - 1e-9));
    return m < 1 ? 1 : m;
}

}  // namespace noise
}  // namespace adaopt
