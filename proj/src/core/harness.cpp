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

#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "errors.hpp"
#include "rng.hpp"

namespace adaopt {
namespace harness {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// small numeric helpers
// ---------------------------------------------------------------------------

std::string fmt_g17(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

std::string fmt_g6(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return std::string(buf);
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

void mean_and_se(const std::vector<double>& v, double& mean, double& se) {
    mean = 0.0;
    se = 0.0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(v.size() - 1);
    se = std::sqrt(var / static_cast<double>(v.size()));
}

Vec resolve_vec(const std::vector<double>& explicit_v, double fill, int dim, const char* what) {
    if (!explicit_v.empty()) {
        if (static_cast<int>(explicit_v.size()) != dim) {
            throw ConfigError(std::string(what) + " has length " +
                              std::to_string(explicit_v.size()) + ", objective dimension is " +
                              std::to_string(dim));
        }
        coordwise::require_finite(explicit_v, what);
        return explicit_v;
    }
    if (!std::isfinite(fill)) {
        throw ConfigError(std::string(what) + " fill value must be finite");
    }
    return Vec(static_cast<std::size_t>(dim), fill);
}

int auto_thinning(std::int64_t n_steps) {
    return static_cast<int>(std::max<std::int64_t>(1, n_steps / 1000));
}

// ---------------------------------------------------------------------------
// strict JSON field access (all failures are ConfigError with the key name)
// ---------------------------------------------------------------------------

double jget_double(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
}

std::int64_t jget_i64(const json& v, const std::string& key) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ConfigError("config key '" + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
}

int jget_int(const json& v, const std::string& key) {
    const std::int64_t x = jget_i64(v, key);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        throw ConfigError("config key '" + key + "' is out of range");
    }
    return static_cast<int>(x);
}

std::uint64_t jget_u64(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    const std::int64_t x = jget_i64(v, key);
    if (x < 0) throw ConfigError("config key '" + key + "' must be >= 0");
    return static_cast<std::uint64_t>(x);
}

bool jget_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
    return v.get<bool>();
}

std::string jget_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> jget_double_array(const json& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(jget_double(e, key));
    return out;
}

// ---------------------------------------------------------------------------
// config serialization
// ---------------------------------------------------------------------------

json vec_or_fill(const std::vector<double>& v, double fill) {
    if (v.empty()) return json(fill);
    return json(v);
}

/// Serializes the configuration. The execution-only fields ("out",
/// "workers") are included only for the lossless round trip; the digest and
/// the config object embedded in result files omit them so that outputs are
/// byte-identical regardless of parallelism degree or output location.
json config_json_obj(const ExperimentConfig& c, bool include_execution) {
    json j;
    j["experiment"] = kind_name(c.kind);
    j["objective"] = c.objective;
    j["dim"] = c.dim;
    j["quad_curvature"] = c.quad_curvature;
    j["quad_center"] = c.quad_center;
    j["beta"] = c.beta;
    j["r"] = c.r;
    j["s"] = c.s;
    j["gamma1"] = c.gamma1;
    j["p1"] = c.p1;
    j["q_inf"] = c.q_inf;
    j["q_c"] = c.q_c;
    j["sigma1"] = c.sigma1;
    j["eps"] = c.eps;
    j["beta2_variant"] = c.beta2_variant;
    j["beta2_value"] = c.beta2_value;
    j["beta2_b"] = c.beta2_b;
    j["beta2_beta"] = c.beta2_beta;
    j["alpha1"] = c.alpha1;
    j["alpha_exp"] = c.alpha_exp;
    j["eps_tilde"] = c.eps_tilde;
    j["variants"] = c.variants;
    j["noise_kind"] = c.noise_kind;
    j["ellipticity_m"] = c.ellipticity_m;
    j["noise_normalized"] = c.noise_normalized;
    j["minibatch_mode"] = c.minibatch_mode;
    j["theta0"] = vec_or_fill(c.theta0, c.theta0_fill);
    j["w0"] = vec_or_fill(c.w0, c.w0_fill);
    j["n_steps"] = c.n_steps;
    j["seeds"] = c.seeds;
    j["base_seed"] = c.base_seed;
    j["thinning"] = c.thinning;
    j["setting"] = c.setting;
    j["n_grid"] = c.n_grid;
    j["dims"] = c.dims;
    j["gamma_override"] = c.gamma_override;
    json cells = json::array();
    for (const auto& cell : c.cells) cells.push_back({cell[0], cell[1], cell[2]});
    j["cells"] = cells;
    j["rho"] = c.rho;
    j["delta"] = c.delta;
    if (include_execution) {
        j["out"] = c.out_dir;
        j["workers"] = c.workers;
    }
    j["override_assumptions"] = c.override_assumptions;
    return j;
}

const char* const kValidSettings[] = {"i", "ii", "iii", "iv"};
const char* const kValidVariants[] = {"constant_one", "constant", "vanishing"};

bool is_one_of(const std::string& v, const char* const* list, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (v == list[i]) return true;
    }
    return false;
}

void apply_key(ExperimentConfig& c, const std::string& key, const json& v,
               ExperimentKind kind) {
    if (key == "experiment") {
        const std::string name = jget_string(v, key);
        if (name != kind_name(kind)) {
            throw ConfigError("config names experiment '" + name + "' but '" +
                              std::string(kind_name(kind)) + "' was requested");
        }
    } else if (key == "objective") {
        c.objective = jget_string(v, key);
        if (c.objective != "quadratic" && c.objective != "saddle") {
            throw ConfigError("objective must be 'quadratic' or 'saddle'");
        }
    } else if (key == "dim") {
        c.dim = jget_int(v, key);
        if (c.dim < 1) throw ConfigError("dim must be >= 1");
    } else if (key == "quad_curvature") {
        c.quad_curvature = jget_double(v, key);
        if (!(c.quad_curvature > 0.0) || !std::isfinite(c.quad_curvature)) {
            throw ConfigError("quad_curvature must be finite and > 0");
        }
    } else if (key == "quad_center") {
        c.quad_center = jget_double(v, key);
        if (!std::isfinite(c.quad_center)) throw ConfigError("quad_center must be finite");
    } else if (key == "beta") {
        c.beta = jget_double(v, key);
    } else if (key == "r") {
        c.r = jget_double(v, key);
    } else if (key == "s") {
        c.s = jget_double(v, key);
    } else if (key == "gamma1") {
        c.gamma1 = jget_double(v, key);
        if (!(c.gamma1 > 0.0)) throw ConfigError("gamma1 must be > 0");
    } else if (key == "p1") {
        c.p1 = jget_double(v, key);
        if (!(c.p1 > 0.0)) throw ConfigError("p1 must be > 0");
    } else if (key == "q_inf") {
        c.q_inf = jget_double(v, key);
        if (!(c.q_inf > 0.0)) throw ConfigError("q_inf must be > 0");
    } else if (key == "q_c") {
        c.q_c = jget_double(v, key);
        if (!(c.q_c >= 0.0)) throw ConfigError("q_c must be >= 0");
    } else if (key == "sigma1") {
        c.sigma1 = jget_double(v, key);
        if (!(c.sigma1 >= 0.0)) throw ConfigError("sigma1 must be >= 0");
    } else if (key == "eps") {
        c.eps = jget_double(v, key);
        if (!(c.eps > 0.0)) throw ConfigError("eps must be > 0");
    } else if (key == "beta2_variant") {
        c.beta2_variant = jget_string(v, key);
        if (!is_one_of(c.beta2_variant, kValidVariants, 3)) {
            throw ConfigError("beta2_variant must be constant_one, constant, or vanishing");
        }
    } else if (key == "beta2_value") {
        c.beta2_value = jget_double(v, key);
        if (!(c.beta2_value > 0.0 && c.beta2_value < 1.0)) {
            throw ConfigError("beta2_value must lie in (0,1)");
        }
    } else if (key == "beta2_b") {
        c.beta2_b = jget_double(v, key);
        if (!(c.beta2_b > 0.0 && c.beta2_b < 1.0)) throw ConfigError("beta2_b must lie in (0,1)");
    } else if (key == "beta2_beta") {
        c.beta2_beta = jget_double(v, key);
        if (!(c.beta2_beta > 0.0)) throw ConfigError("beta2_beta must be > 0");
    } else if (key == "alpha1") {
        c.alpha1 = jget_double(v, key);
        if (!(c.alpha1 > 0.0)) throw ConfigError("alpha1 must be > 0");
    } else if (key == "alpha_exp") {
        c.alpha_exp = jget_double(v, key);
        if (!(c.alpha_exp >= 0.0)) throw ConfigError("alpha_exp must be >= 0");
    } else if (key == "eps_tilde") {
        c.eps_tilde = jget_double(v, key);
        if (!(c.eps_tilde > 0.0)) throw ConfigError("eps_tilde must be > 0");
    } else if (key == "variants") {
        if (!v.is_array()) throw ConfigError("variants must be an array of strings");
        c.variants.clear();
        for (const auto& e : v) {
            const std::string name = jget_string(e, key);
            if (!is_one_of(name, kValidVariants, 3)) {
                throw ConfigError("unknown beta2 variant '" + name + "'");
            }
            c.variants.push_back(name);
        }
    } else if (key == "noise_kind") {
        c.noise_kind = jget_string(v, key);
        if (c.noise_kind != "isotropic" && c.noise_kind != "elliptic" &&
            c.noise_kind != "state_scaled") {
            throw ConfigError("noise_kind must be isotropic, elliptic, or state_scaled");
        }
    } else if (key == "ellipticity_m") {
        c.ellipticity_m = jget_double(v, key);
        if (!(c.ellipticity_m > 0.0)) throw ConfigError("ellipticity_m must be > 0");
    } else if (key == "noise_normalized") {
        c.noise_normalized = jget_bool(v, key);
    } else if (key == "minibatch_mode") {
        c.minibatch_mode = jget_string(v, key);
        if (c.minibatch_mode != "analytic" && c.minibatch_mode != "literal") {
            throw ConfigError("minibatch_mode must be 'analytic' or 'literal'");
        }
    } else if (key == "theta0") {
        if (v.is_number()) {
            c.theta0.clear();
            c.theta0_fill = jget_double(v, key);
        } else {
            c.theta0 = jget_double_array(v, key);
        }
    } else if (key == "w0") {
        if (v.is_number()) {
            c.w0.clear();
            c.w0_fill = jget_double(v, key);
        } else {
            c.w0 = jget_double_array(v, key);
            for (double x : c.w0) {
                if (!(x >= 0.0)) throw ConfigError("w0 entries must be >= 0");
            }
        }
        if (c.w0.empty() && !(c.w0_fill >= 0.0)) throw ConfigError("w0 must be >= 0");
    } else if (key == "n_steps") {
        c.n_steps = jget_i64(v, key);
        if (c.n_steps < 0) throw ConfigError("n_steps must be >= 0");
    } else if (key == "seeds") {
        c.seeds = jget_int(v, key);
        if (c.seeds < 1) throw ConfigError("seeds must be >= 1");
    } else if (key == "base_seed") {
        c.base_seed = jget_u64(v, key);
    } else if (key == "thinning") {
        c.thinning = jget_int(v, key);
        if (c.thinning < 0) throw ConfigError("thinning must be >= 0");
    } else if (key == "setting") {
        c.setting = jget_string(v, key);
        if (!is_one_of(c.setting, kValidSettings, 4)) {
            throw ConfigError("setting must be one of i, ii, iii, iv");
        }
    } else if (key == "n_grid") {
        if (!v.is_array() || v.empty()) throw ConfigError("n_grid must be a non-empty array");
        c.n_grid.clear();
        for (const auto& e : v) {
            const std::int64_t n = jget_i64(e, key);
            if (n < 1) throw ConfigError("n_grid entries must be >= 1");
            if (!c.n_grid.empty() && n <= c.n_grid.back()) {
                throw ConfigError("n_grid must be strictly increasing");
            }
            c.n_grid.push_back(n);
        }
    } else if (key == "dims") {
        if (!v.is_array()) throw ConfigError("dims must be an array");
        c.dims.clear();
        for (const auto& e : v) {
            const int d = jget_int(e, key);
            if (d < 1) throw ConfigError("dims entries must be >= 1");
            c.dims.push_back(d);
        }
    } else if (key == "gamma_override") {
        c.gamma_override = jget_double(v, key);
        if (c.gamma_override < 0.0 && c.gamma_override != -1.0) {
            throw ConfigError("gamma_override must be >= 0 (or -1 to disable)");
        }
    } else if (key == "cells") {
        if (!v.is_array() || v.empty()) throw ConfigError("cells must be a non-empty array");
        c.cells.clear();
        for (const auto& e : v) {
            if (!e.is_array() || e.size() != 3) {
                throw ConfigError("each cell must be a [beta, r, s] triple");
            }
            std::array<double, 3> cell{};
            for (std::size_t i = 0; i < 3; ++i) {
                cell[i] = jget_double(e[i], key);
                if (!std::isfinite(cell[i])) throw ConfigError("cell entries must be finite");
            }
            c.cells.push_back(cell);
        }
    } else if (key == "rho") {
        c.rho = jget_double(v, key);
        if (!(c.rho >= 0.0)) throw ConfigError("rho must be >= 0");
    } else if (key == "delta") {
        c.delta = jget_double(v, key);
        if (!(c.delta > 0.0)) throw ConfigError("delta must be > 0");
    } else if (key == "out") {
        c.out_dir = jget_string(v, key);
    } else if (key == "workers") {
        c.workers = jget_int(v, key);
        if (c.workers < 1) throw ConfigError("workers must be >= 1");
    } else if (key == "override_assumptions") {
        c.override_assumptions = jget_bool(v, key);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

void check_schedule_numbers(const ExperimentConfig& c) {
    const double vals[] = {c.beta, c.r, c.s};
    const char* names[] = {"beta", "r", "s"};
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(vals[i]) || vals[i] < 0.0) {
            throw ConfigError(std::string(names[i]) + " must be finite and >= 0");
        }
    }
    if (c.objective == "saddle" && c.dim != 2) {
        throw ConfigError("the saddle objective is two-dimensional; set dim = 2");
    }
}

schedules::Beta2Schedule make_beta2(const ExperimentConfig& cfg, const std::string& variant) {
    if (variant == "constant_one") return schedules::Beta2Schedule::constant_one();
    if (variant == "constant") return schedules::Beta2Schedule::constant(cfg.beta2_value);
    if (variant == "vanishing") {
        return schedules::Beta2Schedule::vanishing(cfg.beta2_b, cfg.beta2_beta);
    }
    throw ConfigError("unknown beta2 variant '" + variant + "'");
}

// ---------------------------------------------------------------------------
// CSV assembly
// ---------------------------------------------------------------------------

class CsvBuilder {
public:
    CsvBuilder(const std::string& experiment, const std::string& hash,
               const std::string& columns) {
        out_ << "# experiment: " << experiment << "\n";
        out_ << "# config_hash: " << hash << "\n";
        out_ << "# columns: " << columns << "\n";
        out_ << columns << "\n";
    }

    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << "\n";
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

json record_to_json(const optimizer::RunRecord& rec) {
    json j;
    j["seed"] = rec.seed;
    j["n_steps"] = rec.n_steps;
    j["steps_completed"] = rec.steps_completed;
    j["thinning"] = rec.thinning;
    j["diverged"] = rec.diverged;
    j["w_min_seen"] = rec.w_min_seen;
    j["step_index"] = rec.step_index;
    j["f"] = rec.f_series;
    j["grad_norm_sq"] = rec.grad_norm_sq_series;
    j["grad_l1sq"] = rec.grad_l1sq_series;
    j["w_norm"] = rec.w_norm_series;
    j["lyapunov"] = rec.lyapunov_series;
    j["sum_grad"] = rec.sum_grad_series;
    j["sum_w"] = rec.sum_w_series;
    j["theta_final"] = rec.theta_final;
    j["w_final"] = rec.w_final;
    j["f_final"] = rec.f_final;
    j["grad_norm_final"] = rec.grad_norm_final;
    j["w_norm_final"] = rec.w_norm_final;
    j["sum_grad_final"] = rec.sum_grad_final;
    j["sum_w_final"] = rec.sum_w_final;
    return j;
}

/// Share of the gradient series accumulated after the run's midpoint,
/// computed from the sampled partial sums (0 when the series is empty).
double tail_fraction_of(const optimizer::RunRecord& rec) {
    if (rec.step_index.empty() || !(rec.sum_grad_final > 0.0)) return 0.0;
    const std::int64_t half = rec.n_steps / 2;
    // Largest sampled state <= half.
    double sum_half = 0.0;
    for (std::size_t i = 0; i < rec.step_index.size(); ++i) {
        if (rec.step_index[i] <= half) {
            sum_half = rec.sum_grad_series[i];
        } else {
            break;
        }
    }
    return (rec.sum_grad_final - sum_half) / rec.sum_grad_final;
}

std::string guarantee_label(schedules::Regime regime) {
    switch (regime) {
        case schedules::Regime::LocalMinimizer:
            return "local-minimizer";
        case schedules::Regime::CriticalPoint:
            return "critical-point";
        case schedules::Regime::Invalid:
        default:
            return "no guarantee";
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// kinds, defaults, parsing
// ---------------------------------------------------------------------------

const char* kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Run:
            return "run";
        case ExperimentKind::RateStudy:
            return "rate-study";
        case ExperimentKind::TrapStudy:
            return "trap-study";
        case ExperimentKind::EquivCheck:
            return "equiv-check";
        case ExperimentKind::Validate:
        default:
            return "validate";
    }
}

ExperimentKind kind_from_name(const std::string& name) {
    if (name == "run") return ExperimentKind::Run;
    if (name == "rate-study") return ExperimentKind::RateStudy;
    if (name == "trap-study") return ExperimentKind::TrapStudy;
    if (name == "equiv-check") return ExperimentKind::EquivCheck;
    if (name == "validate") return ExperimentKind::Validate;
    throw ConfigError("unknown experiment '" + name + "'");
}

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    switch (kind) {
        case ExperimentKind::Run:
            break;
        case ExperimentKind::RateStudy:
            c.dim = 10;
            c.seeds = 100;
            break;
        case ExperimentKind::TrapStudy:
            c.objective = "saddle";
            c.dim = 2;
            c.seeds = 50;
            c.n_steps = 10000;
            c.sigma1 = 0.3;
            break;
        case ExperimentKind::EquivCheck:
            c.dim = 5;
            c.n_steps = 10000;
            break;
        case ExperimentKind::Validate:
            break;
    }
    return c;
}

ExperimentConfig parse_config(const std::string& json_text, ExperimentKind kind) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    ExperimentConfig c = default_config(kind);
    for (const auto& item : j.items()) {
        apply_key(c, item.key(), item.value(), kind);
    }
    check_schedule_numbers(c);
    return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), kind);
}

std::string config_to_json(const ExperimentConfig& cfg) {
    return config_json_obj(cfg, true).dump(2) + "\n";
}

std::string config_digest(const ExperimentConfig& cfg) {
    const std::string canonical = config_json_obj(cfg, false).dump();
    std::uint64_t h = 14695981039346656037ULL;  // FNV-1a 64 offset basis
    for (unsigned char ch : canonical) {
        h ^= static_cast<std::uint64_t>(ch);
        h *= 1099511628211ULL;  // FNV-1a 64 prime
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// finite-horizon settings
// ---------------------------------------------------------------------------

Thm2Params thm2_setting_params(const std::string& setting, int d, std::int64_t n) {
    if (d < 1) throw InvalidArgument("thm2_setting_params: d must be >= 1");
    if (n < 1) throw InvalidArgument("thm2_setting_params: N must be >= 1");
    const double dd = static_cast<double>(d);
    const double nn = static_cast<double>(n);
    const double root_n = std::sqrt(nn);
    Thm2Params p{};
    if (setting == "i") {
        p.gamma = 1.0 / (dd * root_n);
        p.p = 1.0 / root_n;
        p.q = 1.0 / root_n;
        p.sigma_sq = 1.0;
    } else if (setting == "ii") {
        p.gamma = 1.0 / root_n;
        p.p = 1.0;
        p.q = 1.0;
        p.sigma_sq = 1.0 / (dd * root_n);
    } else if (setting == "iii") {
        const double root_dn = std::sqrt(dd * nn);
        p.gamma = 1.0 / root_dn;
        p.p = 1.0 / root_dn;
        p.q = 1.0 / root_dn;
        p.sigma_sq = 1.0;
    } else if (setting == "iv") {
        p.gamma = 1.0 / root_n;
        p.p = 1.0 / root_n;
        p.q = 1.0 / root_n;
        p.sigma_sq = 1.0 / dd;
    } else {
        throw ConfigError("setting must be one of i, ii, iii, iv");
    }
    return p;
}

double thm2_required_n(const std::string& setting, int d, double delta) {
    if (d < 1) throw InvalidArgument("thm2_required_n: d must be >= 1");
    if (!(delta > 0.0)) throw InvalidArgument("thm2_required_n: delta must be > 0");
    const double dd = static_cast<double>(d);
    if (setting == "i") return (dd / delta) * (dd / delta);
    if (setting == "ii") return 1.0 / (delta * delta);
    if (setting == "iii") return dd / (delta * delta);
    if (setting == "iv") return 1.0 / (delta * delta);
    throw ConfigError("setting must be one of i, ii, iii, iv");
}

double thm2_cost(const std::string& setting, int d, double delta) {
    const double n = thm2_required_n(setting, d, delta);
    const double dd = static_cast<double>(d);
    double sigma_sq = 1.0;
    if (setting == "ii") {
        sigma_sq = 1.0 / (dd * std::sqrt(n));
    } else if (setting == "iv") {
        sigma_sq = 1.0 / dd;
    }
    return n / sigma_sq;
}

// ---------------------------------------------------------------------------
// factories
// ---------------------------------------------------------------------------

std::shared_ptr<const objectives::Objective> make_objective(const ExperimentConfig& cfg,
                                                            int dim) {
    if (cfg.objective == "quadratic") {
        return objectives::quadratic_objective(dim, cfg.quad_center, cfg.quad_curvature);
    }
    if (cfg.objective == "saddle") {
        if (dim != 2) throw ConfigError("the saddle objective is two-dimensional");
        return objectives::saddle_objective();
    }
    throw ConfigError("objective must be 'quadratic' or 'saddle'");
}

noise::NoiseModel make_noise(const ExperimentConfig& cfg, int dim) {
    if (cfg.noise_kind == "isotropic") {
        return noise::NoiseModel::isotropic(dim, cfg.noise_normalized);
    }
    if (cfg.noise_kind == "elliptic") {
        return noise::NoiseModel::elliptic_axis(dim, cfg.ellipticity_m, cfg.noise_normalized);
    }
    if (cfg.noise_kind == "state_scaled") {
        return noise::NoiseModel::state_scaled(dim);
    }
    throw ConfigError("noise_kind must be isotropic, elliptic, or state_scaled");
}

schedules::ScheduleSet make_schedules(const ExperimentConfig& cfg) {
    return schedules::ScheduleSet(schedules::PowerSeq(cfg.gamma1, cfg.beta),
                                  schedules::PowerSeq(cfg.p1, cfg.r),
                                  schedules::QSeq(cfg.q_inf, cfg.q_c, cfg.r),
                                  schedules::PowerSeq(cfg.sigma1, cfg.s), cfg.eps);
}

// ---------------------------------------------------------------------------
// worker pool
// ---------------------------------------------------------------------------

void parallel_for(int n_tasks, int workers, const std::function<void(int)>& body) {
    if (n_tasks <= 0) return;
    const int w = std::max(1, std::min(workers, n_tasks));
    if (w == 1) {
        for (int i = 0; i < n_tasks; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto drain = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_tasks) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                break;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// experiments
// ---------------------------------------------------------------------------

RunStudyResult run_study(const ExperimentConfig& cfg) {
    const auto obj = make_objective(cfg, cfg.dim);
    const int d = obj->dim();
    const noise::NoiseModel model = make_noise(cfg, d);
    const schedules::ScheduleSet set = make_schedules(cfg);
    const Vec theta0 = resolve_vec(cfg.theta0, cfg.theta0_fill, d, "theta0");
    const Vec w0 = resolve_vec(cfg.w0, cfg.w0_fill, d, "w0");

    const schedules::ScheduleTable table = schedules::tabulate(set, cfg.n_steps);
    optimizer::RunOptions opts;
    opts.thinning = cfg.thinning > 0 ? cfg.thinning : auto_thinning(cfg.n_steps);
    opts.override_assumptions = cfg.override_assumptions;
    opts.literal_minibatch = cfg.minibatch_mode == "literal";
    opts.table = &table;

    RunStudyResult res;
    res.records.resize(static_cast<std::size_t>(cfg.seeds));
    const std::string digest = config_digest(cfg);
    parallel_for(cfg.seeds, cfg.workers, [&](int i) {
        res.records[static_cast<std::size_t>(i)] =
            optimizer::run(*obj, set, model, theta0, w0, cfg.n_steps,
                           cfg.base_seed + static_cast<std::uint64_t>(i), opts);
        res.records[static_cast<std::size_t>(i)].config_digest = digest;
    });

    std::vector<double> grads, ws, tails;
    for (const auto& rec : res.records) {
        if (rec.diverged) ++res.n_diverged;
        grads.push_back(rec.grad_norm_final);
        ws.push_back(rec.w_norm_final);
        res.tail_fractions.push_back(tail_fraction_of(rec));
        tails.push_back(res.tail_fractions.back());
    }
    res.median_grad_norm_final = median_of(grads);
    res.median_w_norm_final = median_of(ws);
    res.median_tail_fraction = median_of(tails);
    return res;
}

RateStudyResult rate_study(const ExperimentConfig& cfg) {
    const std::vector<int> dims = cfg.dims.empty() ? std::vector<int>{cfg.dim} : cfg.dims;
    const int m = cfg.seeds;

    struct CellRef {
        int d;
        std::int64_t n;
    };
    std::vector<CellRef> refs;
    for (int d : dims) {
        for (std::int64_t n : cfg.n_grid) refs.push_back({d, n});
    }

    // Objectives and noise models prebuilt per dimension; both are immutable
    // and shared across workers.
    std::vector<std::shared_ptr<const objectives::Objective>> objs;
    std::vector<noise::NoiseModel> models;
    for (int d : dims) {
        objs.push_back(make_objective(cfg, d));
        models.push_back(make_noise(cfg, d));
    }
    auto dim_slot = [&](int d) {
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (dims[i] == d) return i;
        }
        throw ExperimentFailure("rate_study: internal dimension lookup failed");
    };

    std::vector<std::vector<double>> metrics(refs.size(),
                                             std::vector<double>(static_cast<std::size_t>(m)));
    const int n_tasks = static_cast<int>(refs.size()) * m;
    parallel_for(n_tasks, cfg.workers, [&](int task) {
        const std::size_t cell = static_cast<std::size_t>(task) / static_cast<std::size_t>(m);
        const int k = task % m;
        const CellRef ref = refs[cell];
        Thm2Params pr = thm2_setting_params(cfg.setting, ref.d, ref.n);
        if (cfg.gamma_override >= 0.0) pr.gamma = cfg.gamma_override;
        const std::size_t slot = dim_slot(ref.d);
        const Vec theta0 = resolve_vec(cfg.theta0, cfg.theta0_fill, ref.d, "theta0");
        const Vec w0 = resolve_vec(cfg.w0, cfg.w0_fill, ref.d, "w0");
        const optimizer::RunRecord rec = optimizer::run_constant(
            *objs[slot], pr.gamma, pr.p, pr.q, pr.sigma_sq, cfg.eps, theta0, w0, ref.n,
            cfg.base_seed + static_cast<std::uint64_t>(k), models[slot], 0);
        if (rec.diverged) {
            throw ExperimentFailure("rate_study: run diverged (setting " + cfg.setting +
                                    ", d=" + std::to_string(ref.d) +
                                    ", N=" + std::to_string(ref.n) +
                                    ", seed=" + std::to_string(rec.seed) + ")");
        }
        metrics[cell][static_cast<std::size_t>(k)] = diagnostics::rate_metric(rec);
    });

    RateStudyResult res;
    for (std::size_t c = 0; c < refs.size(); ++c) {
        RateCell cell;
        cell.setting = cfg.setting;
        cell.d = refs[c].d;
        cell.n = refs[c].n;
        cell.m = m;
        cell.metrics = metrics[c];
        mean_and_se(cell.metrics, cell.metric_mean, cell.metric_se);
        res.cells.push_back(std::move(cell));
    }
    for (std::size_t i = 0; i < dims.size(); ++i) {
        RateSlope slope;
        slope.setting = cfg.setting;
        slope.d = dims[i];
        std::vector<double> ns, means;
        for (const auto& cell : res.cells) {
            if (cell.d == dims[i]) {
                ns.push_back(static_cast<double>(cell.n));
                means.push_back(cell.metric_mean);
            }
        }
        slope.slope = ns.size() >= 2 ? diagnostics::log_log_slope(ns, means)
                                     : std::numeric_limits<double>::quiet_NaN();
        res.slopes.push_back(slope);
    }
    return res;
}

std::vector<PhaseCell> trap_study(const ExperimentConfig& cfg) {
    if (cfg.objective != "saddle") {
        throw ConfigError("trap-study requires objective = 'saddle'");
    }
    const auto obj = make_objective(cfg, 2);
    const noise::NoiseModel model = make_noise(cfg, 2);

    Vec saddle_location;
    for (const auto& cp : obj->critical_points()) {
        if (cp.kind == objectives::CriticalKind::Saddle) {
            saddle_location = cp.location;
            break;
        }
    }
    if (saddle_location.empty()) {
        throw ExperimentFailure("trap-study: objective exposes no saddle point");
    }
    const double escape_threshold = objectives::saddle_ystar() / 2.0;

    std::vector<PhaseCell> out;
    for (const auto& cell : cfg.cells) {
        const double beta = cell[0], r = cell[1], s = cell[2];
        const schedules::ScheduleSet set(schedules::PowerSeq(cfg.gamma1, beta),
                                         schedules::PowerSeq(cfg.p1, r),
                                         schedules::QSeq(cfg.q_inf, cfg.q_c, r),
                                         schedules::PowerSeq(cfg.sigma1, s), cfg.eps);
        const schedules::ScheduleTable table = schedules::tabulate(set, cfg.n_steps);
        optimizer::RunOptions opts;
        opts.thinning = 0;  // only the end point matters
        opts.override_assumptions = cfg.override_assumptions;
        opts.literal_minibatch = cfg.minibatch_mode == "literal";
        opts.table = &table;

        PhaseCell pc;
        pc.beta = beta;
        pc.r = r;
        pc.s = s;
        pc.runs = cfg.seeds;
        pc.n_steps = cfg.n_steps;
        pc.predicted = schedules::classify_regime(beta, r, s);
        pc.final_abs_y.assign(static_cast<std::size_t>(cfg.seeds), 0.0);

        std::vector<int> diverged(static_cast<std::size_t>(cfg.seeds), 0);
        const Vec w0(2, 0.0);
        parallel_for(cfg.seeds, cfg.workers, [&](int k) {
            const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(k);
            Vec theta0 = saddle_location;
            if (cfg.rho > 0.0) {
                // Uniform draw from the disc of radius rho, via rejection
                // from the bounding square; stream 1 is reserved so the
                // perturbation never shares randomness with the run itself.
                RngStream pert(seed, 1);
                double u0, u1;
                do {
                    u0 = pert.uniform(-cfg.rho, cfg.rho);
                    u1 = pert.uniform(-cfg.rho, cfg.rho);
                } while (u0 * u0 + u1 * u1 > cfg.rho * cfg.rho);
                theta0[0] += u0;
                theta0[1] += u1;
            }
            const optimizer::RunRecord rec =
                optimizer::run(*obj, set, model, theta0, w0, cfg.n_steps, seed, opts);
            pc.final_abs_y[static_cast<std::size_t>(k)] = std::abs(rec.theta_final[1]);
            diverged[static_cast<std::size_t>(k)] = rec.diverged ? 1 : 0;
        });

        int escaped = 0;
        for (std::size_t k = 0; k < pc.final_abs_y.size(); ++k) {
            if (pc.final_abs_y[k] >= escape_threshold) ++escaped;
            pc.n_diverged += diverged[k];
        }
        pc.escape_fraction = static_cast<double>(escaped) / static_cast<double>(cfg.seeds);
        out.push_back(std::move(pc));
    }
    return out;
}

std::vector<EquivRow> equiv_check(const ExperimentConfig& cfg) {
    if (cfg.n_steps > 100000) {
        throw ConfigError("equiv-check: n_steps must be <= 100000");
    }
    const auto obj = make_objective(cfg, cfg.dim);
    const int d = obj->dim();
    const noise::NoiseModel model = make_noise(cfg, d);
    const schedules::PowerSeq alpha(cfg.alpha1, cfg.alpha_exp);
    const schedules::PowerSeq sigma(cfg.sigma1, cfg.s);
    const Vec theta0 = resolve_vec(cfg.theta0, cfg.theta0_fill, d, "theta0");
    const Vec v0 = resolve_vec(cfg.w0, cfg.w0_fill, d, "w0");

    std::vector<std::string> variants = cfg.variants;
    if (variants.empty()) variants = {"constant_one", "constant", "vanishing"};

    std::vector<EquivRow> rows;
    for (const auto& name : variants) {
        const schedules::Beta2Schedule b2 = make_beta2(cfg, name);
        EquivRow row;
        row.variant = name;
        row.n_steps = cfg.n_steps;
        row.max_deviation = optimizer::equivalence_max_deviation(
            *obj, model, alpha, b2, sigma, cfg.eps_tilde, theta0, v0, cfg.n_steps, cfg.base_seed);
        rows.push_back(std::move(row));
    }
    return rows;
}

ValidateResult validate(const ExperimentConfig& cfg) {
    ValidateResult res;
    const schedules::ScheduleSet set = make_schedules(cfg);
    res.checks = schedules::validate_assumptions(set);
    res.regime = schedules::classify_regime(cfg.beta, cfg.r, cfg.s);
    for (const char* setting : kValidSettings) {
        CostRow row;
        row.setting = setting;
        row.d = cfg.dim;
        row.delta = cfg.delta;
        row.n_required = thm2_required_n(setting, cfg.dim, cfg.delta);
        const double dd = static_cast<double>(cfg.dim);
        row.sigma_sq = 1.0;
        if (row.setting == "ii") {
            row.sigma_sq = 1.0 / (dd * std::sqrt(row.n_required));
        } else if (row.setting == "iv") {
            row.sigma_sq = 1.0 / dd;
        }
        row.cost = row.n_required / row.sigma_sq;
        res.cost_rows.push_back(std::move(row));
    }
    return res;
}

// ---------------------------------------------------------------------------
// dispatch + serialization
// ---------------------------------------------------------------------------

namespace {

ExperimentResult shell_for(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.name = kind_name(cfg.kind);
    res.config_hash = config_digest(cfg);
    return res;
}

void serialize_run(const ExperimentConfig& cfg, const RunStudyResult& r, ExperimentResult& out) {
    CsvBuilder csv(out.name, out.config_hash,
                   "config_hash,seed,step,f,grad_norm_sq,grad_l1sq,w_norm,lyapunov,sum_grad,"
                   "sum_w");
    for (const auto& rec : r.records) {
        for (std::size_t i = 0; i < rec.step_index.size(); ++i) {
            csv.row({out.config_hash, std::to_string(rec.seed),
                     std::to_string(rec.step_index[i]), fmt_g17(rec.f_series[i]),
                     fmt_g17(rec.grad_norm_sq_series[i]), fmt_g17(rec.grad_l1sq_series[i]),
                     fmt_g17(rec.w_norm_series[i]), fmt_g17(rec.lyapunov_series[i]),
                     fmt_g17(rec.sum_grad_series[i]), fmt_g17(rec.sum_w_series[i])});
        }
    }
    out.csv_text = csv.str();

    json j;
    j["experiment"] = out.name;
    j["config_hash"] = out.config_hash;
    j["config"] = config_json_obj(cfg, false);
    j["aggregate"] = {{"median_grad_norm_final", r.median_grad_norm_final},
                      {"median_w_norm_final", r.median_w_norm_final},
                      {"median_tail_fraction", r.median_tail_fraction},
                      {"n_diverged", r.n_diverged}};
    json records = json::array();
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        json rec = record_to_json(r.records[i]);
        rec["tail_fraction"] = r.tail_fractions[i];
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    out.summary_json = j.dump(2) + "\n";

    std::ostringstream rep;
    rep << "run: " << cfg.seeds << " seed(s) x " << cfg.n_steps << " steps, objective "
        << cfg.objective << " (d=" << cfg.dim << ")\n";
    rep << "  median |grad f(theta_N)| = " << fmt_g6(r.median_grad_norm_final) << "\n";
    rep << "  median |w_N|             = " << fmt_g6(r.median_w_norm_final) << "\n";
    rep << "  median series tail share = " << fmt_g6(r.median_tail_fraction) << "\n";
    if (r.n_diverged > 0) {
        rep << "  diverged runs: " << r.n_diverged << "/" << cfg.seeds << "\n";
    }
    out.report_text = rep.str();
}

void serialize_rate(const ExperimentConfig& cfg, const RateStudyResult& r,
                    ExperimentResult& out) {
    // The fitted slope of each (setting, d) group is repeated on its rows.
    CsvBuilder csv(out.name, out.config_hash,
                   "config_hash,base_seed,setting,d,n,m,metric_mean,metric_se,slope");
    for (const auto& cell : r.cells) {
        double slope = std::numeric_limits<double>::quiet_NaN();
        for (const auto& sl : r.slopes) {
            if (sl.d == cell.d) slope = sl.slope;
        }
        csv.row({out.config_hash, std::to_string(cfg.base_seed), cell.setting,
                 std::to_string(cell.d), std::to_string(cell.n), std::to_string(cell.m),
                 fmt_g17(cell.metric_mean), fmt_g17(cell.metric_se), fmt_g17(slope)});
    }
    out.csv_text = csv.str();

    json j;
    j["experiment"] = out.name;
    j["config_hash"] = out.config_hash;
    j["config"] = config_json_obj(cfg, false);
    json cells = json::array();
    for (const auto& cell : r.cells) {
        cells.push_back({{"setting", cell.setting},
                         {"d", cell.d},
                         {"n", cell.n},
                         {"m", cell.m},
                         {"metric_mean", cell.metric_mean},
                         {"metric_se", cell.metric_se},
                         {"metrics", cell.metrics}});
    }
    j["cells"] = std::move(cells);
    json slopes = json::array();
    for (const auto& sl : r.slopes) {
        slopes.push_back({{"setting", sl.setting}, {"d", sl.d}, {"slope", sl.slope}});
    }
    j["slopes"] = std::move(slopes);
    out.summary_json = j.dump(2) + "\n";

    std::ostringstream rep;
    rep << "rate-study: setting " << cfg.setting << ", " << cfg.seeds << " seed(s) per cell\n";
    for (const auto& cell : r.cells) {
        rep << "  d=" << cell.d << " N=" << cell.n << ": metric " << fmt_g6(cell.metric_mean)
            << " +/- " << fmt_g6(cell.metric_se) << "\n";
    }
    for (const auto& sl : r.slopes) {
        rep << "  d=" << sl.d << ": fitted log-log slope " << fmt_g6(sl.slope) << "\n";
    }
    out.report_text = rep.str();
}

void serialize_trap(const ExperimentConfig& cfg, const std::vector<PhaseCell>& cells,
                    ExperimentResult& out) {
    CsvBuilder csv(out.name, out.config_hash,
                   "config_hash,base_seed,beta,r,s,m,n_steps,escape_fraction,predicted_regime,"
                   "guarantee");
    for (const auto& pc : cells) {
        csv.row({out.config_hash, std::to_string(cfg.base_seed), fmt_g17(pc.beta), fmt_g17(pc.r),
                 fmt_g17(pc.s), std::to_string(pc.runs), std::to_string(pc.n_steps),
                 fmt_g17(pc.escape_fraction), schedules::regime_name(pc.predicted),
                 guarantee_label(pc.predicted)});
    }
    out.csv_text = csv.str();

    json j;
    j["experiment"] = out.name;
    j["config_hash"] = out.config_hash;
    j["config"] = config_json_obj(cfg, false);
    json jc = json::array();
    for (const auto& pc : cells) {
        jc.push_back({{"beta", pc.beta},
                      {"r", pc.r},
                      {"s", pc.s},
                      {"m", pc.runs},
                      {"n_steps", pc.n_steps},
                      {"escape_fraction", pc.escape_fraction},
                      {"predicted_regime", schedules::regime_name(pc.predicted)},
                      {"guarantee", guarantee_label(pc.predicted)},
                      {"final_abs_y", pc.final_abs_y},
                      {"n_diverged", pc.n_diverged}});
    }
    j["cells"] = std::move(jc);
    out.summary_json = j.dump(2) + "\n";

    std::ostringstream rep;
    rep << "trap-study: " << cfg.seeds << " run(s) per cell, N=" << cfg.n_steps
        << ", rho=" << fmt_g6(cfg.rho) << "\n";
    for (const auto& pc : cells) {
        rep << "  (beta=" << fmt_g6(pc.beta) << ", r=" << fmt_g6(pc.r) << ", s=" << fmt_g6(pc.s)
            << "): escape " << fmt_g6(pc.escape_fraction) << " ["
            << schedules::regime_name(pc.predicted) << " -> " << guarantee_label(pc.predicted)
            << "]\n";
    }
    out.report_text = rep.str();
}

void serialize_equiv(const ExperimentConfig& cfg, const std::vector<EquivRow>& rows,
                     ExperimentResult& out) {
    CsvBuilder csv(out.name, out.config_hash,
                   "config_hash,base_seed,variant,n_steps,max_deviation");
    for (const auto& row : rows) {
        csv.row({out.config_hash, std::to_string(cfg.base_seed), row.variant,
                 std::to_string(row.n_steps), fmt_g17(row.max_deviation)});
    }
    out.csv_text = csv.str();

    json j;
    j["experiment"] = out.name;
    j["config_hash"] = out.config_hash;
    j["config"] = config_json_obj(cfg, false);
    json jr = json::array();
    for (const auto& row : rows) {
        jr.push_back({{"variant", row.variant},
                      {"n_steps", row.n_steps},
                      {"max_deviation", row.max_deviation}});
    }
    j["rows"] = std::move(jr);
    out.summary_json = j.dump(2) + "\n";

    std::ostringstream rep;
    rep << "equiv-check: d=" << cfg.dim << ", " << cfg.n_steps << " steps\n";
    for (const auto& row : rows) {
        rep << "  " << row.variant << ": max |theta~ - theta| = " << fmt_g6(row.max_deviation)
            << "\n";
    }
    out.report_text = rep.str();
}

void serialize_validate(const ExperimentConfig& cfg, const ValidateResult& r,
                        ExperimentResult& out) {
    CsvBuilder csv(out.name, out.config_hash,
                   "config_hash,base_seed,setting,d,delta,n_required,sigma_sq,cost");
    for (const auto& row : r.cost_rows) {
        csv.row({out.config_hash, std::to_string(cfg.base_seed), row.setting,
                 std::to_string(row.d), fmt_g17(row.delta), fmt_g17(row.n_required),
                 fmt_g17(row.sigma_sq), fmt_g17(row.cost)});
    }
    out.csv_text = csv.str();

    json j;
    j["experiment"] = out.name;
    j["config_hash"] = out.config_hash;
    j["config"] = config_json_obj(cfg, false);
    json checks = json::array();
    for (const auto& chk : r.checks.checks) {
        checks.push_back({{"name", chk.name}, {"pass", chk.pass}, {"detail", chk.detail}});
    }
    j["checks"] = std::move(checks);
    j["regime"] = schedules::regime_name(r.regime);
    json costs = json::array();
    for (const auto& row : r.cost_rows) {
        costs.push_back({{"setting", row.setting},
                         {"d", row.d},
                         {"delta", row.delta},
                         {"n_required", row.n_required},
                         {"sigma_sq", row.sigma_sq},
                         {"cost", row.cost}});
    }
    j["cost_table"] = std::move(costs);
    out.summary_json = j.dump(2) + "\n";

    std::ostringstream rep;
    rep << "validate: schedule assumptions\n";
    for (const auto& chk : r.checks.checks) {
        rep << "  [" << (chk.pass ? "PASS" : "FAIL") << "] " << chk.name;
        if (!chk.detail.empty()) rep << ": " << chk.detail;
        rep << "\n";
    }
    rep << "  regime(beta=" << fmt_g6(cfg.beta) << ", r=" << fmt_g6(cfg.r)
        << ", s=" << fmt_g6(cfg.s) << ") = " << schedules::regime_name(r.regime) << "\n";
    rep << "  oracle cost at delta=" << fmt_g6(cfg.delta) << ", d=" << cfg.dim << ":\n";
    for (const auto& row : r.cost_rows) {
        rep << "    setting " << row.setting << ": N = " << fmt_g6(row.n_required)
            << ", cost = " << fmt_g6(row.cost) << "\n";
    }
    out.report_text = rep.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult res = shell_for(cfg);
    switch (cfg.kind) {
        case ExperimentKind::Run:
            serialize_run(cfg, run_study(cfg), res);
            break;
        case ExperimentKind::RateStudy:
            serialize_rate(cfg, rate_study(cfg), res);
            break;
        case ExperimentKind::TrapStudy:
            serialize_trap(cfg, trap_study(cfg), res);
            break;
        case ExperimentKind::EquivCheck:
            serialize_equiv(cfg, equiv_check(cfg), res);
            break;
        case ExperimentKind::Validate:
            serialize_validate(cfg, validate(cfg), res);
            break;
    }

    if (!cfg.out_dir.empty()) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(fs::path(cfg.out_dir), ec);
        if (ec) {
            throw IoError("cannot create output directory '" + cfg.out_dir +
                          "': " + ec.message());
        }
        const fs::path base = fs::path(cfg.out_dir) / res.name;
        res.csv_path = (base.string() + ".csv");
        res.json_path = (base.string() + ".json");
        write_text_file(res.csv_path, res.csv_text);
        write_text_file(res.json_path, res.summary_json);
    }
    return res;
}

}  // namespace harness
}  // namespace adaopt
