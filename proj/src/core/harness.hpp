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

#ifndef ADAOPT_CORE_HARNESS_HPP
#define ADAOPT_CORE_HARNESS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "noise.hpp"
#include "objectives.hpp"
#include "optimizer.hpp"
#include "report.hpp"
#include "schedules.hpp"

namespace adaopt {
namespace harness {

enum class ExperimentKind { Run, RateStudy, TrapStudy, EquivCheck, Validate };

/// Canonical kind spellings, identical to the CLI subcommands and to the
/// output file stems: "run", "rate-study", "trap-study", "equiv-check",
/// "validate".
const char* kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name);  ///< throws ConfigError

/// Flat experiment configuration. Every field has a serving default; a JSON
/// config file overrides fields by key (unknown keys are a hard ConfigError)
/// and the whole struct round-trips losslessly through config_to_json.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Run;

    // Objective ("quadratic" with uniform curvature/center, or "saddle",
    // which is two-dimensional by construction).
    std::string objective = "quadratic";
    int dim = 2;
    double quad_curvature = 1.0;
    double quad_center = 0.0;

    // Canonical schedule family: gamma_n = gamma1 n^-beta, p_n = p1 n^-r,
    // q_n = q_inf + q_c n^-r, sigma_n = sigma1 n^-s, stabilizer eps.
    double beta = 0.75;
    double r = 0.5;
    double s = 0.0;
    double gamma1 = 0.5;
    double p1 = 1.0;
    double q_inf = 1.0;
    double q_c = 0.0;
    double sigma1 = 0.1;
    double eps = 1e-4;

    // Historical parametrization (equiv-check): step alpha_n = alpha1
    // n^-alpha_exp, averaging factor beta2(n) per variant, stabilizer
    // eps_tilde.
    std::string beta2_variant = "vanishing";  // constant_one | constant | vanishing
    double beta2_value = 0.9;                 // the constant variant's value
    double beta2_b = 0.5;                     // vanishing: beta2(n) = 1 - b n^-beta2_beta
    double beta2_beta = 0.7;
    double alpha1 = 0.1;
    double alpha_exp = 0.5;
    double eps_tilde = 1e-8;
    std::vector<std::string> variants;  // equiv-check variants; empty = all three

    // Gradient noise.
    std::string noise_kind = "isotropic";  // isotropic | elliptic | state_scaled
    double ellipticity_m = 1.0;            // elliptic: covariance diag(1, m, ..., m)
    bool noise_normalized = false;
    std::string minibatch_mode = "analytic";  // analytic | literal

    // Initialization: explicit vectors win over uniform fills.
    std::vector<double> theta0;
    double theta0_fill = 1.0;
    std::vector<double> w0;
    double w0_fill = 0.0;

    // Horizon and replication.
    std::int64_t n_steps = 1000;
    int seeds = 1;
    std::uint64_t base_seed = 12345;
    int thinning = 0;  // 0 = automatic (about 1000 sampled states per run)

    // Rate study.
    std::string setting = "ii";  // i | ii | iii | iv
    std::vector<std::int64_t> n_grid = {100, 1000, 10000};
    std::vector<int> dims;          // empty = {dim}
    double gamma_override = -1.0;   // >= 0 replaces the setting's step size

    // Trap study: exponent cells (beta, r, s) and the start perturbation.
    std::vector<std::array<double, 3>> cells = {{{0.75, 0.5, 0.0}}};
    double rho = 1e-3;

    // Validate: target accuracy for the cost table.
    double delta = 0.1;

    // Plumbing.
    std::string out_dir;
    int workers = 1;
    bool override_assumptions = false;
};

/// Kind-specific serving defaults (dimensions, seed counts, horizons).
ExperimentConfig default_config(ExperimentKind kind);

/// Strict parse: starts from default_config(kind), applies the JSON
/// object's keys, rejects unknown keys and ill-typed or out-of-range
/// values with ConfigError. An "experiment" key, when present, must match
/// the requested kind.
ExperimentConfig parse_config(const std::string& json_text, ExperimentKind kind);
ExperimentConfig load_config(const std::string& path, ExperimentKind kind);

/// Canonical JSON serialization (sorted keys, lossless round-trip).
std::string config_to_json(const ExperimentConfig& cfg);

/// 64-bit FNV-1a digest of the canonical serialization, as 16 hex digits;
/// stamped on every output row.
std::string config_digest(const ExperimentConfig& cfg);

/// Constant parameters of the four finite-horizon settings:
///   i)   gamma = 1/(d sqrt(N)),  p = q = 1/sqrt(N),   sigma^2 = 1
///   ii)  gamma = 1/sqrt(N),      p = q = 1,           sigma^2 = 1/(d sqrt(N))
///   iii) gamma = 1/sqrt(dN),     p = q = 1/sqrt(dN),  sigma^2 = 1
///   iv)  gamma = 1/sqrt(N),      p = q = 1/sqrt(N),   sigma^2 = 1/d
struct Thm2Params {
    double gamma;
    double p;
    double q;
    double sigma_sq;
};
Thm2Params thm2_setting_params(const std::string& setting, int d, std::int64_t n);

/// Horizon making the setting's stationarity bound reach accuracy delta,
/// and the resulting oracle cost N * sigma^-2.
double thm2_required_n(const std::string& setting, int d, double delta);
double thm2_cost(const std::string& setting, int d, double delta);

/// Config-driven factories shared by every experiment.
std::shared_ptr<const objectives::Objective> make_objective(const ExperimentConfig& cfg, int dim);
noise::NoiseModel make_noise(const ExperimentConfig& cfg, int dim);
schedules::ScheduleSet make_schedules(const ExperimentConfig& cfg);

/// Runs body(0..n_tasks-1) on a shared-nothing pool of at most `workers`
/// threads (1 = strictly serial). The first exception thrown by any task is
/// rethrown after all workers stop. Task outputs must go to preallocated
/// per-index slots so results are independent of scheduling.
void parallel_for(int n_tasks, int workers, const std::function<void(int)>& body);

/// --- structured experiment results -------------------------------------

struct RunStudyResult {
    std::vector<optimizer::RunRecord> records;  ///< seed-ordered
    std::vector<double> tail_fractions;  ///< per record: share of the gradient
                                         ///< series accumulated after step N/2
    double median_grad_norm_final = 0.0;
    double median_w_norm_final = 0.0;
    double median_tail_fraction = 0.0;
    int n_diverged = 0;
};
RunStudyResult run_study(const ExperimentConfig& cfg);

struct RateCell {
    std::string setting;
    int d = 0;
    std::int64_t n = 0;
    int m = 0;
    double metric_mean = 0.0;
    double metric_se = 0.0;
    std::vector<double> metrics;  ///< per-seed rate metric values
};
struct RateSlope {
    std::string setting;
    int d = 0;
    double slope = 0.0;
};
struct RateStudyResult {
    std::vector<RateCell> cells;    ///< ordered by (d, N)
    std::vector<RateSlope> slopes;  ///< one per d, OLS on log mean vs log N
};
RateStudyResult rate_study(const ExperimentConfig& cfg);

struct PhaseCell {
    double beta = 0.0;
    double r = 0.0;
    double s = 0.0;
    int runs = 0;
    std::int64_t n_steps = 0;
    double escape_fraction = 0.0;
    schedules::Regime predicted = schedules::Regime::Invalid;
    std::vector<double> final_abs_y;  ///< per-seed |y_N|
    int n_diverged = 0;
};
std::vector<PhaseCell> trap_study(const ExperimentConfig& cfg);

struct EquivRow {
    std::string variant;
    std::int64_t n_steps = 0;
    double max_deviation = 0.0;
};
std::vector<EquivRow> equiv_check(const ExperimentConfig& cfg);

struct CostRow {
    std::string setting;
    int d = 0;
    double delta = 0.0;
    double n_required = 0.0;
    double sigma_sq = 0.0;  ///< the setting's noise level at N = n_required
    double cost = 0.0;      ///< N * sigma^-2
};
struct ValidateResult {
    ValidationReport checks;
    schedules::Regime regime = schedules::Regime::Invalid;
    std::vector<CostRow> cost_rows;  ///< all four settings at (dim, delta)
};
ValidateResult validate(const ExperimentConfig& cfg);

/// --- dispatch + serialization -------------------------------------------

struct ExperimentResult {
    std::string name;          ///< file stem == kind_name(cfg.kind)
    std::string config_hash;
    std::string report_text;   ///< human-readable summary for the terminal
    std::string csv_text;      ///< full CSV table (header comments included)
    std::string summary_json;  ///< full JSON document
    std::string csv_path;      ///< set when cfg.out_dir was written to
    std::string json_path;
};

/// Runs the configured experiment, serializes its outputs, and writes
/// <out>/<experiment>.csv and .json when cfg.out_dir is non-empty. Throws
/// ConfigError for configuration problems and ExperimentFailure (or other
/// Error subclasses) for runtime failures.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace harness
}  // namespace adaopt

#endif  // ADAOPT_CORE_HARNESS_HPP
