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

#include "schedules.hpp"

#include <sstream>

namespace adaopt {
namespace schedules {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

SchedulePoint eval_schedules(const ScheduleSet& set, std::int64_t n) {
    if (n < 1) {
        throw InvalidArgument("eval_schedules: step index must be >= 1");
    }
    return SchedulePoint{
        set.gamma.value(n + 1),
        set.p.value(n),
        set.q.value(n),
        set.sigma.value(n + 1),
    };
}

ScheduleTable tabulate(const ScheduleSet& set, std::int64_t n_steps) {
    if (n_steps < 0) {
        throw InvalidArgument("tabulate: n_steps must be >= 0");
    }
    ScheduleTable t;
    t.eps = set.eps;
    t.gamma_next.resize(static_cast<std::size_t>(n_steps));
    t.p.resize(static_cast<std::size_t>(n_steps));
    t.q.resize(static_cast<std::size_t>(n_steps));
    t.sigma_next.resize(static_cast<std::size_t>(n_steps));
    for (std::int64_t n = 0; n < n_steps; ++n) {
        const std::size_t i = static_cast<std::size_t>(n);
        t.gamma_next[i] = set.gamma.value(n + 1);
        t.p[i] = set.p.value(n);  // clamps index 0 to 1
        t.q[i] = set.q.value(n);
        t.sigma_next[i] = set.sigma.value(n + 1);
    }
    return t;
}

ValidationReport validate_assumptions(const ScheduleSet& set) {
    const double beta = set.beta();
    const double r = set.r();
    const double s = set.s();

    ValidationReport report;

    {
        const bool pass = beta <= 1.0;
        report.checks.push_back({"sum_gamma_diverges", pass,
                                 "sum gamma_n = inf requires beta <= 1; beta = " + fmt(beta)});
    }
    {
        const bool pass = beta > 0.5;
        report.checks.push_back({"sum_gamma_sq_converges", pass,
                                 "sum gamma_n^2 < inf requires beta > 1/2; beta = " + fmt(beta)});
    }
    {
        const double total = beta + r + 2.0 * s;
        const bool pass = total > 1.0;
        report.checks.push_back({"sum_p_gamma_sigma2_converges", pass,
                                 "sum p_n gamma_{n+1} sigma_{n+1}^2 < inf requires beta + r + 2s > 1; "
                                 "beta + r + 2s = " + fmt(total)});
    }
    {
        // Both sequences are non-increasing, so the largest products are the
        // limiting one and the very first pairing.
        const double limit_product = set.gamma.value(1) * set.q.q_inf();
        const double first_product = set.gamma.value(2) * set.q.value(1);
        const double worst = std::max(limit_product, first_product);
        const bool pass = worst < 1.0;
        report.checks.push_back({"gamma_q_product_below_one", pass,
                                 "requires gamma_1 q_inf < 1 and gamma_{n+1} q_n < 1; worst product = " +
                                 fmt(worst)});
    }
    {
        const bool pass = r < beta;
        report.checks.push_back({"gamma_over_p_vanishes", pass,
                                 "gamma_{n+1}/p_n -> 0 requires r < beta; r = " + fmt(r) +
                                 ", beta = " + fmt(beta)});
    }
    return report;
}

Regime classify_regime(double beta, double r, double s) {
    const bool valid = beta > 0.5 && beta <= 1.0 && r >= 0.0 && s >= 0.0 &&
                       beta + r + 2.0 * s > 1.0 && r < beta;
    if (!valid) return Regime::Invalid;

    const bool beta_window = beta < 1.0;
    const bool batch_small = s <= (1.0 - beta) / 2.0;
    const double lower = std::max(1.0 - beta, beta / 2.0 + s);
    const bool r_window = r > lower && r < beta;
    if (beta_window && batch_small && r_window) return Regime::LocalMinimizer;
    return Regime::CriticalPoint;
}

const char* regime_name(Regime regime) {
    switch (regime) {
        case Regime::Invalid:
            return "Invalid";
        case Regime::CriticalPoint:
            return "CriticalPoint";
        case Regime::LocalMinimizer:
        default:
            return "LocalMinimizer";
    }
}

std::vector<double> sn_values(const Beta2Schedule& b2, std::int64_t n_max) {
    if (n_max < 1) {
        throw InvalidArgument("sn_values: n_max must be >= 1");
    }
    std::vector<double> s(static_cast<std::size_t>(n_max) + 1);
    s[0] = 1.0;
    for (std::int64_t n = 0; n < n_max; ++n) {
        s[static_cast<std::size_t>(n) + 1] = b2.value(n) * s[static_cast<std::size_t>(n)] + 1.0;
    }
    return s;
}

CanonicalSteps historical_to_canonical(const PowerSeq& alpha, const Beta2Schedule& b2,
                                       std::int64_t n_max) {
    if (n_max < 1) {
        throw InvalidArgument("historical_to_canonical: n_max must be >= 1");
    }
    CanonicalSteps out;
    out.s = sn_values(b2, n_max);
    out.gamma.resize(static_cast<std::size_t>(n_max));
    out.gamma_tilde.resize(static_cast<std::size_t>(n_max));
    for (std::int64_t n = 0; n < n_max; ++n) {
        const std::size_t i = static_cast<std::size_t>(n);
        out.gamma[i] = alpha.value(n + 1) / std::sqrt(out.s[i]);
        out.gamma_tilde[i] = 1.0 / out.s[i + 1];
    }
    return out;
}

}  // namespace schedules
}  // namespace adaopt
