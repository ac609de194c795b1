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

#ifndef ADAOPT_CORE_SCHEDULES_HPP
#define ADAOPT_CORE_SCHEDULES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "report.hpp"

namespace adaopt {
namespace schedules {

/// Decreasing power law n |-> coef * n^(-exponent).
///
/// Sequences are indexed from n = 1. The very first optimizer update also
/// needs values at index 0 (the p/q factors paired with the first step);
/// those are defined by clamping the index to 1, which keeps every sequence
/// non-increasing over its whole domain.
class PowerSeq {
public:
    /// coef >= 0 (zero only for the noiseless degenerate), exponent >= 0.
    PowerSeq(double coef, double exponent) : coef_(coef), exponent_(exponent) {
        if (!(coef >= 0.0) || !std::isfinite(coef)) {
            throw InvalidArgument("PowerSeq: coefficient must be finite and >= 0");
        }
        if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
            throw InvalidArgument("PowerSeq: exponent must be finite and >= 0");
        }
    }

    double value(std::int64_t n) const {
        const double nn = static_cast<double>(std::max<std::int64_t>(n, 1));
        if (exponent_ == 0.0) return coef_;
        return coef_ * std::pow(nn, -exponent_);
    }

    double coef() const { return coef_; }
    double exponent() const { return exponent_; }

private:
    double coef_;
    double exponent_;
};

/// Non-increasing sequence q_n = q_inf + c * n^(-r) converging to q_inf > 0.
/// The default c = 0 gives the constant sequence q_n = q_inf; a positive c
/// makes |q_n - q_inf| decay exactly like the p-sequence when r matches its
/// exponent.
class QSeq {
public:
    explicit QSeq(double q_inf, double c = 0.0, double r = 0.0)
        : q_inf_(q_inf), c_(c), r_(r) {
        if (!(q_inf > 0.0) || !std::isfinite(q_inf)) {
            throw InvalidArgument("QSeq: q_inf must be finite and > 0");
        }
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw InvalidArgument("QSeq: c must be finite and >= 0 (non-increasing sequence)");
        }
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw InvalidArgument("QSeq: r must be finite and >= 0");
        }
    }

    double value(std::int64_t n) const {
        if (c_ == 0.0) return q_inf_;
        const double nn = static_cast<double>(std::max<std::int64_t>(n, 1));
        return q_inf_ + c_ * std::pow(nn, -r_);
    }

    double q_inf() const { return q_inf_; }
    double c() const { return c_; }
    double r() const { return r_; }

private:
    double q_inf_;
    double c_;
    double r_;
};

/// All tunable sequences of the method: the step sizes gamma_n = gamma1 n^-beta,
/// the scaling gains p_n = p1 n^-r and q_n -> q_inf, the noise scale
/// sigma_n = sigma1 n^-s, and the stabilizer eps > 0.
struct ScheduleSet {
    PowerSeq gamma;  ///< step size; exponent is beta
    PowerSeq p;      ///< scaling gain; exponent is r (p_inf = 0 when r > 0)
    QSeq q;          ///< scaling leak, converging to q_inf > 0
    PowerSeq sigma;  ///< noise scale; exponent is s
    double eps;      ///< stabilizer added under the square root

    ScheduleSet(PowerSeq gamma_, PowerSeq p_, QSeq q_, PowerSeq sigma_, double eps_)
        : gamma(gamma_), p(p_), q(q_), sigma(sigma_), eps(eps_) {
        if (!(eps > 0.0) || !std::isfinite(eps)) {
            throw InvalidArgument("ScheduleSet: eps must be finite and > 0");
        }
        if (!(gamma.coef() > 0.0)) {
            throw InvalidArgument("ScheduleSet: gamma1 must be > 0");
        }
        if (!(p.coef() > 0.0)) {
            throw InvalidArgument("ScheduleSet: p1 must be > 0");
        }
    }

    double beta() const { return gamma.exponent(); }
    double r() const { return p.exponent(); }
    double s() const { return sigma.exponent(); }

    /// Limit of p_n (0 for a genuinely decaying sequence, p1 when constant).
    double p_inf() const { return p.exponent() > 0.0 ? 0.0 : p.coef(); }

    /// Supremum of p_n over n >= 0 (attained at the clamped start).
    double p_sup() const { return p.coef(); }
};

/// Values consumed by the update from state index n: the step gamma_{n+1},
/// the gains p_n and q_n, and the noise scale sigma_{n+1}.
struct SchedulePoint {
    double gamma_next;
    double p;
    double q;
    double sigma_next;
};

/// Evaluates all four sequences at the index pairing used by one update.
/// Requires n >= 1; the state-0 values are produced internally by the run
/// loop via index clamping.
SchedulePoint eval_schedules(const ScheduleSet& set, std::int64_t n);

/// Per-step schedule values for states n = 0 .. n_steps-1, precomputed so
/// that many seeded runs of the same configuration share one table.
struct ScheduleTable {
    std::vector<double> gamma_next;  ///< [n] = gamma_{n+1}
    std::vector<double> p;           ///< [n] = p_n   (p_0 = p_1 by clamping)
    std::vector<double> q;           ///< [n] = q_n   (q_0 = q_1 by clamping)
    std::vector<double> sigma_next;  ///< [n] = sigma_{n+1}
    double eps = 0.0;
};

ScheduleTable tabulate(const ScheduleSet& set, std::int64_t n_steps);

/// Checks the summability/smallness assumptions on a schedule set. All
/// series criteria are decided symbolically from the exponents (p-series
/// thresholds), never by numeric summation. Failures are report entries.
ValidationReport validate_assumptions(const ScheduleSet& set);

/// Convergence regime promised by the theory for exponents (beta, r, s).
enum class Regime {
    Invalid,         ///< assumptions unmet; no guarantee
    CriticalPoint,   ///< almost-sure convergence to a critical point
    LocalMinimizer,  ///< additionally, unstable equilibria are avoided
};

/// Classifies the (beta, r, s) exponent triple. Boundary equalities fall to
/// the weaker regime because the underlying conditions are strict:
///   valid:          1/2 < beta <= 1,  beta + r + 2s > 1,  0 <= r < beta, s >= 0
///   local minimizer: additionally beta < 1, s <= (1-beta)/2, and
///                    max(1-beta, beta/2 + s) < r < beta
Regime classify_regime(double beta, double r, double s);

const char* regime_name(Regime regime);

/// Variants of the averaging factor beta2(n) used by the historical form.
enum class Beta2Variant {
    ConstantOne,  ///< beta2(n) = 1 (pure gradient-square accumulation)
    Constant,     ///< beta2(n) = beta2 in (0,1) (exponential moving average)
    Vanishing,    ///< beta2(n) = 1 - b*n^-beta, b in (0,1), beta > 0
};

/// The averaging factor sequence beta2(n), always in (0, 1].
/// Index 0 (the first use of the normalizing recursion) clamps to n = 1.
class Beta2Schedule {
public:
    static Beta2Schedule constant_one() { return Beta2Schedule(Beta2Variant::ConstantOne, 1.0, 0.0, 0.0); }

    static Beta2Schedule constant(double beta2) {
        if (!(beta2 > 0.0 && beta2 < 1.0)) {
            throw InvalidArgument("Beta2Schedule: constant beta2 must lie in (0,1)");
        }
        return Beta2Schedule(Beta2Variant::Constant, beta2, 0.0, 0.0);
    }

    static Beta2Schedule vanishing(double b, double beta) {
        if (!(b > 0.0 && b < 1.0)) {
            throw InvalidArgument("Beta2Schedule: b must lie in (0,1)");
        }
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            throw InvalidArgument("Beta2Schedule: beta must be > 0");
        }
        return Beta2Schedule(Beta2Variant::Vanishing, 0.0, b, beta);
    }

    double value(std::int64_t n) const {
        switch (variant_) {
            case Beta2Variant::ConstantOne:
                return 1.0;
            case Beta2Variant::Constant:
                return beta2_;
            case Beta2Variant::Vanishing:
            default: {
                const double nn = static_cast<double>(std::max<std::int64_t>(n, 1));
                return 1.0 - b_ * std::pow(nn, -beta_);
            }
        }
    }

    Beta2Variant variant() const { return variant_; }
    double constant_value() const { return beta2_; }
    double b() const { return b_; }
    double beta() const { return beta_; }

private:
    Beta2Schedule(Beta2Variant v, double beta2, double b, double beta)
        : variant_(v), beta2_(beta2), b_(b), beta_(beta) {}

    Beta2Variant variant_;
    double beta2_;
    double b_;
    double beta_;
};

/// Normalizing sequence of the historical form: S_0 = 1 and
/// S_{n+1} = beta2(n) * S_n + 1, returned for n = 0 .. n_max.
std::vector<double> sn_values(const Beta2Schedule& b2, std::int64_t n_max);

/// Canonical step data derived from a historical parametrization: the
/// position step gamma_{n+1} = alpha_{n+1} / sqrt(S_n), the scaling step
/// gamma~_{n+1} = 1 / S_{n+1}, and unit gains p = q = 1.
struct CanonicalSteps {
    std::vector<double> s;            ///< S_0 .. S_{n_max}
    std::vector<double> gamma;        ///< [n] = gamma_{n+1} for n = 0 .. n_max-1
    std::vector<double> gamma_tilde;  ///< [n] = gamma~_{n+1} = 1/S_{n+1}
    double p = 1.0;
    double q = 1.0;
};

CanonicalSteps historical_to_canonical(const PowerSeq& alpha, const Beta2Schedule& b2,
                                       std::int64_t n_max);

}  // namespace schedules
}  // namespace adaopt

#endif  // ADAOPT_CORE_SCHEDULES_HPP
