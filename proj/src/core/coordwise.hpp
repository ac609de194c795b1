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

#ifndef ADAOPT_CORE_COORDWISE_HPP
#define ADAOPT_CORE_COORDWISE_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"

namespace adaopt {

/// Dense real vector; every operation in this module is per-coordinate on
/// equal-length vectors (dimension mismatch is a hard error, not broadcast).
using Vec = std::vector<double>;

namespace coordwise {

/// Throws DimensionMismatch unless u and v have equal length.
inline void require_same_dim(const Vec& u, const Vec& v, const char* op) {
    if (u.size() != v.size()) {
        throw DimensionMismatch(std::string(op) + ": vector lengths differ (" +
                                std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()) + ")");
    }
}

/// Coordinate-wise quotient (u/v)_i = u_i / v_i.
/// Throws DivisionByZero naming the first offending index.
inline Vec cdiv(const Vec& u, const Vec& v) {
    require_same_dim(u, v, "cdiv");
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (v[i] == 0.0) {
            throw DivisionByZero("cdiv: zero divisor at index " +
                                 std::to_string(i));
        }
        out[i] = u[i] / v[i];
    }
    return out;
}

/// Coordinate-wise product (u*v)_i = u_i * v_i.
inline Vec cmul(const Vec& u, const Vec& v) {
    require_same_dim(u, v, "cmul");
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * v[i];
    return out;
}

/// Coordinate-wise square (u^2)_i = u_i^2; result is non-negative.
inline Vec csq(const Vec& u) {
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * u[i];
    return out;
}

/// Coordinate-wise square root; requires u_i >= 0 for all i.
/// Throws NegativeEntry naming the first offending index.
inline Vec csqrt(const Vec& u) {
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] < 0.0) {
            throw NegativeEntry("csqrt: negative entry at index " +
                                std::to_string(i));
        }
        out[i] = std::sqrt(u[i]);
    }
    return out;
}

/// Scalar shift (u + eps)_i = u_i + eps.
inline Vec cadd_scalar(const Vec& u, double eps) {
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + eps;
    return out;
}

/// Sum of shifted entries, sum_i (w_i + eps) -- the squared norm of the
/// square-rooted shifted vector. Requires w_i + eps >= 0.
inline double sum_plus_eps(const Vec& w, double eps) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double shifted = w[i] + eps;
        if (shifted < 0.0) {
            throw NegativeEntry("sum_plus_eps: negative shifted entry at index " +
                                std::to_string(i));
        }
        acc += shifted;
    }
    return acc;
}

/// Sum of square roots of shifted entries, sum_i sqrt(w_i + eps) -- the
/// squared norm of the quarter-power shifted vector. Requires w_i + eps >= 0.
inline double root_sum(const Vec& w, double eps) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double shifted = w[i] + eps;
        if (shifted < 0.0) {
            throw NegativeEntry("root_sum: negative shifted entry at index " +
                                std::to_string(i));
        }
        acc += std::sqrt(shifted);
    }
    return acc;
}

/// Squared Euclidean norm sum_i u_i^2.
inline double norm_sq(const Vec& u) {
    double acc = 0.0;
    for (double x : u) acc += x * x;
    return acc;
}

/// Euclidean norm.
inline double norm(const Vec& u) { return std::sqrt(norm_sq(u)); }

/// True when every entry is finite (no NaN, no infinity).
inline bool all_finite(const Vec& u) {
    for (double x : u) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

/// Throws NonFiniteInput naming the first non-finite index.
inline void require_finite(const Vec& u, const char* what) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u[i])) {
            throw NonFiniteInput(std::string(what) +
                                 ": non-finite entry at index " +
                                 std::to_string(i));
        }
    }
}

}  // namespace coordwise
}  // namespace adaopt

#endif  // ADAOPT_CORE_COORDWISE_HPP
