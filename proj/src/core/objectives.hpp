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

#ifndef ADAOPT_CORE_OBJECTIVES_HPP
#define ADAOPT_CORE_OBJECTIVES_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "coordwise.hpp"
#include "report.hpp"

namespace adaopt {
namespace objectives {

enum class CriticalKind { Minimum, Saddle, Maximum };

struct CriticalPoint {
    Vec location;
    CriticalKind kind;
};

/// A smooth test function with certified constants: L bounds the gradient's
/// Lipschitz modulus, growth_cf bounds the ratio |grad f|^2 / f, and
/// f_min > 0 lower-bounds f everywhere. Objectives are immutable after
/// construction; all evaluations are pure and concurrency-safe.
class Objective {
public:
    virtual ~Objective() = default;

    virtual int dim() const = 0;
    virtual std::string name() const = 0;

    virtual double value(const Vec& theta) const = 0;
    virtual Vec gradient(const Vec& theta) const = 0;

    /// Allocation-free gradient for hot loops; out must have length dim().
    virtual void gradient_into(const Vec& theta, Vec& out) const { out = gradient(theta); }

    virtual bool has_hessian() const { return false; }

    /// Row-major dim() x dim() second-derivative matrix.
    /// Throws InvalidArgument when has_hessian() is false.
    virtual std::vector<double> hessian(const Vec& theta) const;

    /// Lipschitz constant of the gradient.
    virtual double lipschitz() const = 0;

    /// Growth constant: |grad f(theta)|^2 <= growth_cf * f(theta).
    virtual double growth_cf() const = 0;

    /// Certified positive lower bound of f.
    virtual double f_min() const = 0;

    virtual std::vector<CriticalPoint> critical_points() const = 0;

    /// Half-width of the symmetric certification box used to validate the
    /// sampled constants (0 when the constants are exact).
    virtual double certification_box() const { return 0.0; }

protected:
    void require_dim(const Vec& theta) const;
};

/// Convex benchmark f(theta) = 1 + 1/2 sum_i a_i (theta_i - c_i)^2 with
/// exact constants L = max a_i, c_f = 2 max a_i, f_min = 1, and a unique
/// minimum at the center.
std::shared_ptr<const Objective> quadratic_objective(int dim, const Vec& center, const Vec& diag);

/// Convenience overload: common center value and unit curvature.
std::shared_ptr<const Objective> quadratic_objective(int dim, double center_fill = 0.0,
                                                     double curvature = 1.0);

/// Two-dimensional benchmark with a strict saddle at the origin and two
/// symmetric minima: f(x, y) = 1 + x^2 + g(y) where
/// g(y) = sqrt(4 + y^2) + 2 exp(-y^2) - 2. The growth of g is linear at
/// infinity, which keeps |grad f|^2 <= c_f * f satisfiable globally.
/// Constants: L = 3.5 (attained by g'' at 0), c_f = 8 (twice the global
/// supremum of the ratio, which tends to 4 as |x| grows), f_min = 1.
std::shared_ptr<const Objective> saddle_objective();

/// The y-coordinate of the saddle objective's minima (root of g' on (0,2)).
double saddle_ystar();

/// Central finite-difference gradient with step h per coordinate.
Vec fd_gradient(const Objective& obj, const Vec& theta, double h);

/// Central finite-difference Hessian (differences of the analytic gradient).
std::vector<double> fd_hessian(const Objective& obj, const Vec& theta, double h);

/// Samples the certified-constant assumptions over the box [-box, box]^d:
/// the Lipschitz ratio, the growth ratio, the lower bound of f, and the
/// agreement of analytic and finite-difference gradients (central step 1e-5,
/// relative tolerance 1e-6). Violations are report entries, not exceptions.
ValidationReport check_hf(const Objective& obj, double box, int n_samples, std::uint64_t seed);

}  // namespace objectives
}  // namespace adaopt

#endif  // ADAOPT_CORE_OBJECTIVES_HPP
