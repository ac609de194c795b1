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

#include "objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rng.hpp"

namespace adaopt {
namespace objectives {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

class QuadraticObjective final : public Objective {
public:
    QuadraticObjective(int dim, Vec center, Vec diag)
        : dim_(dim), center_(std::move(center)), diag_(std::move(diag)) {
        if (dim < 1) throw InvalidArgument("quadratic_objective: dim must be >= 1");
        if (center_.size() != static_cast<std::size_t>(dim) ||
            diag_.size() != static_cast<std::size_t>(dim)) {
            throw DimensionMismatch("quadratic_objective: center/diag length must equal dim");
        }
        max_a_ = 0.0;
        for (double a : diag_) {
            if (!(a > 0.0) || !std::isfinite(a)) {
                throw InvalidArgument("quadratic_objective: curvatures must be finite and > 0");
            }
            max_a_ = std::max(max_a_, a);
        }
    }

    int dim() const override { return dim_; }
    std::string name() const override { return "quadratic"; }

    double value(const Vec& theta) const override {
        require_dim(theta);
        double acc = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double z = theta[i] - center_[i];
            acc += diag_[i] * z * z;
        }
        return 1.0 + 0.5 * acc;
    }

    Vec gradient(const Vec& theta) const override {
        Vec g(dim_);
        gradient_into(theta, g);
        return g;
    }

    void gradient_into(const Vec& theta, Vec& out) const override {
        require_dim(theta);
        for (int i = 0; i < dim_; ++i) out[i] = diag_[i] * (theta[i] - center_[i]);
    }

    bool has_hessian() const override { return true; }

    std::vector<double> hessian(const Vec& theta) const override {
        require_dim(theta);
        std::vector<double> h(static_cast<std::size_t>(dim_) * dim_, 0.0);
        for (int i = 0; i < dim_; ++i) h[static_cast<std::size_t>(i) * dim_ + i] = diag_[i];
        return h;
    }

    double lipschitz() const override { return max_a_; }
    double growth_cf() const override { return 2.0 * max_a_; }
    double f_min() const override { return 1.0; }

    std::vector<CriticalPoint> critical_points() const override {
        return {CriticalPoint{center_, CriticalKind::Minimum}};
    }

private:
    int dim_;
    Vec center_;
    Vec diag_;
    double max_a_;
};

// One-dimensional profile of the saddle objective's second coordinate.
double saddle_g(double y) {
    return std::sqrt(4.0 + y * y) + 2.0 * std::exp(-y * y) - 2.0;
}

double saddle_gp(double y) {
    return y / std::sqrt(4.0 + y * y) - 4.0 * y * std::exp(-y * y);
}

double saddle_gpp(double y) {
    const double y2 = y * y;
    return 4.0 * std::pow(4.0 + y2, -1.5) + (8.0 * y2 - 4.0) * std::exp(-y2);
}

double find_ystar() {
    // g' changes sign on (1, 2): negative at 1, positive at 2.
    double lo = 1.0, hi = 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (saddle_gp(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

class SaddleObjective final : public Objective {
public:
    SaddleObjective() : ystar_(find_ystar()) {}

    int dim() const override { return 2; }
    std::string name() const override { return "saddle"; }

    double value(const Vec& theta) const override {
        require_dim(theta);
        return 1.0 + theta[0] * theta[0] + saddle_g(theta[1]);
    }

    Vec gradient(const Vec& theta) const override {
        Vec g(2);
        gradient_into(theta, g);
        return g;
    }

    void gradient_into(const Vec& theta, Vec& out) const override {
        require_dim(theta);
        out[0] = 2.0 * theta[0];
        out[1] = saddle_gp(theta[1]);
    }

    bool has_hessian() const override { return true; }

    std::vector<double> hessian(const Vec& theta) const override {
        require_dim(theta);
        return {2.0, 0.0, 0.0, saddle_gpp(theta[1])};
    }

    // The gradient's Lipschitz modulus is the supremum of the Hessian norm:
    // max(2, sup |g''|) with sup |g''| = |g''(0)| = 3.5.
    double lipschitz() const override { return 3.5; }

    // The growth ratio |grad f|^2 / f tends to 4 as |x| -> inf (and stays
    // below 4 on the certification box); 8 carries a factor-2 margin.
    double growth_cf() const override { return 8.0; }

    double f_min() const override { return 1.0; }

    std::vector<CriticalPoint> critical_points() const override {
        return {
            CriticalPoint{{0.0, 0.0}, CriticalKind::Saddle},
            CriticalPoint{{0.0, ystar_}, CriticalKind::Minimum},
            CriticalPoint{{0.0, -ystar_}, CriticalKind::Minimum},
        };
    }

    double certification_box() const override { return 25.0; }

    double ystar() const { return ystar_; }

private:
    double ystar_;
};

}  // namespace

void Objective::require_dim(const Vec& theta) const {
    if (theta.size() != static_cast<std::size_t>(dim())) {
        throw DimensionMismatch(name() + ": argument length " + std::to_string(theta.size()) +
                                " does not match dimension " + std::to_string(dim()));
    }
}

std::vector<double> Objective::hessian(const Vec&) const {
    throw InvalidArgument(name() + ": no analytic second derivative available");
}

std::shared_ptr<const Objective> quadratic_objective(int dim, const Vec& center, const Vec& diag) {
    return std::make_shared<QuadraticObjective>(dim, center, diag);
}

std::shared_ptr<const Objective> quadratic_objective(int dim, double center_fill, double curvature) {
    return std::make_shared<QuadraticObjective>(dim, Vec(static_cast<std::size_t>(dim), center_fill),
                                                Vec(static_cast<std::size_t>(dim), curvature));
}

std::shared_ptr<const Objective> saddle_objective() { return std::make_shared<SaddleObjective>(); }

double saddle_ystar() {
    static const double ystar = find_ystar();
    return ystar;
}

Vec fd_gradient(const Objective& obj, const Vec& theta, double h) {
    Vec out(theta.size());
    Vec probe = theta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        probe[i] = theta[i] + h;
        const double fp = obj.value(probe);
        probe[i] = theta[i] - h;
        const double fm = obj.value(probe);
        probe[i] = theta[i];
        out[i] = (fp - fm) / (2.0 * h);
    }
    return out;
}

std::vector<double> fd_hessian(const Objective& obj, const Vec& theta, double h) {
    const int d = obj.dim();
    std::vector<double> hess(static_cast<std::size_t>(d) * d, 0.0);
    Vec probe = theta;
    for (int j = 0; j < d; ++j) {
        probe[j] = theta[j] + h;
        const Vec gp = obj.gradient(probe);
        probe[j] = theta[j] - h;
        const Vec gm = obj.gradient(probe);
        probe[j] = theta[j];
        for (int i = 0; i < d; ++i) {
            hess[static_cast<std::size_t>(i) * d + j] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    // Symmetrize to remove the finite-difference asymmetry.
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const double avg = 0.5 * (hess[static_cast<std::size_t>(i) * d + j] +
                                      hess[static_cast<std::size_t>(j) * d + i]);
            hess[static_cast<std::size_t>(i) * d + j] = avg;
            hess[static_cast<std::size_t>(j) * d + i] = avg;
        }
    }
    return hess;
}

ValidationReport check_hf(const Objective& obj, double box, int n_samples, std::uint64_t seed) {
    if (n_samples < 2) throw InvalidArgument("check_hf: n_samples must be >= 2");
    const int d = obj.dim();
    RngStream rng(seed);

    auto sample_point = [&]() {
        Vec x(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = rng.uniform(-box, box);
        return x;
    };

    double max_lipschitz_ratio = 0.0;
    double max_growth_ratio = 0.0;
    double min_value = std::numeric_limits<double>::infinity();
    double max_fd_err = 0.0;
    const int n_fd = std::min(n_samples, 100);

    for (int k = 0; k < n_samples; ++k) {
        const Vec x = sample_point();
        const double fx = obj.value(x);
        const Vec gx = obj.gradient(x);
        min_value = std::min(min_value, fx);
        max_growth_ratio = std::max(max_growth_ratio, coordwise::norm_sq(gx) / fx);

        // Probe the Lipschitz ratio against both a far point and a near
        // perturbation (the near pair approaches the local Hessian norm).
        Vec y = sample_point();
        if (k % 2 == 1) {
            y = x;
            for (int i = 0; i < d; ++i) {
                y[static_cast<std::size_t>(i)] += 0.01 * rng.normal();
            }
        }
        const Vec gy = obj.gradient(y);
        double diff_sq = 0.0, dist_sq = 0.0;
        for (int i = 0; i < d; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            diff_sq += (gx[ii] - gy[ii]) * (gx[ii] - gy[ii]);
            dist_sq += (x[ii] - y[ii]) * (x[ii] - y[ii]);
        }
        if (dist_sq > 0.0) {
            max_lipschitz_ratio = std::max(max_lipschitz_ratio, std::sqrt(diff_sq / dist_sq));
        }

        if (k < n_fd) {
            const Vec gfd = fd_gradient(obj, x, 1e-5);
            double err_sq = 0.0;
            for (int i = 0; i < d; ++i) {
                const std::size_t ii = static_cast<std::size_t>(i);
                err_sq += (gfd[ii] - gx[ii]) * (gfd[ii] - gx[ii]);
            }
            const double rel = std::sqrt(err_sq) / std::max(1.0, coordwise::norm(gx));
            max_fd_err = std::max(max_fd_err, rel);
        }
    }

    ValidationReport report;
    report.checks.push_back({"gradient_lipschitz",
                             max_lipschitz_ratio <= obj.lipschitz() * (1.0 + 1e-9),
                             "max sampled |grad f(x)-grad f(y)|/|x-y| = " + fmt(max_lipschitz_ratio) +
                                 " vs L = " + fmt(obj.lipschitz())});
    report.checks.push_back({"growth_bound", max_growth_ratio <= obj.growth_cf() * (1.0 + 1e-9),
                             "max sampled |grad f|^2/f = " + fmt(max_growth_ratio) + " vs c_f = " +
                                 fmt(obj.growth_cf())});
    report.checks.push_back({"lower_bound", min_value >= obj.f_min() && obj.f_min() > 0.0,
                             "min sampled f = " + fmt(min_value) + " vs certified bound " +
                                 fmt(obj.f_min())});
    report.checks.push_back({"fd_gradient_agreement", max_fd_err <= 1e-6,
                             "max relative error of central differences (step 1e-5) = " +
                                 fmt(max_fd_err)});
    return report;
}

}  // namespace objectives
}  // namespace adaopt
