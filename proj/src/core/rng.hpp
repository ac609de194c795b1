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

#ifndef ADAOPT_CORE_RNG_HPP
#define ADAOPT_CORE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace adaopt {

/// Seeded random stream with bit-exact reproducibility across hosts.
///
/// The raw engine is the standard 64-bit Mersenne twister, whose output is
/// fully specified by the standard. Uniform and normal variates are derived
/// here by fixed arithmetic (53-bit uniforms, Box-Muller normals) rather
/// than through std::*_distribution, whose algorithms are
/// implementation-defined and would break cross-toolchain determinism.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed)
        : seed_(seed), engine_(splitmix64(seed)) {}

    /// Stream derived from (base_seed, stream_index); distinct indices give
    /// statistically independent streams for parallel runs.
    RngStream(std::uint64_t base_seed, std::uint64_t stream_index)
        : RngStream(mix(base_seed, stream_index)) {}

    /// Next raw 64-bit word.
    std::uint64_t next_u64() {
        ++position_;
        return engine_();
    }

    /// Uniform on (0, 1], with 53 significant bits (never exactly 0, so it
    /// is safe under a logarithm).
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform on [a, b).
    double uniform(double a, double b) { return a + (b - a) * (uniform01() - 0x1.0p-53); }

    /// Uniform integer in {lo, ..., hi} by rejection-free scaling (adequate
    /// for the small ranges used here).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1u;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    /// Standard normal variate via the Box-Muller transform; pairs are
    /// generated together and the spare is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Derived independent stream (for deterministic Monte Carlo sharding).
    RngStream substream(std::uint64_t index) const { return RngStream(seed_, index + 1); }

    std::uint64_t seed() const { return seed_; }

    /// Number of raw 64-bit words drawn so far.
    std::uint64_t position() const { return position_; }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /// Collision-resistant combination of a base seed and a stream index.
    static std::uint64_t mix(std::uint64_t base, std::uint64_t index) {
        return splitmix64(splitmix64(base) ^ splitmix64(~index));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::uint64_t position_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace adaopt

#endif  // ADAOPT_CORE_RNG_HPP
