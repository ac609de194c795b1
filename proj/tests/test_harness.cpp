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

#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/harness.hpp"

using namespace adaopt;
using namespace adaopt::harness;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("experiment kinds round-trip through their names") {
    for (ExperimentKind kind :
         {ExperimentKind::Run, ExperimentKind::RateStudy, ExperimentKind::TrapStudy,
          ExperimentKind::EquivCheck, ExperimentKind::Validate}) {
        CHECK(kind_from_name(kind_name(kind)) == kind);
    }
    CHECK(std::string(kind_name(ExperimentKind::RateStudy)) == "rate-study");
    CHECK_THROWS_AS(kind_from_name("frobnicate"), ConfigError);
}

TEST_CASE("configs round-trip losslessly through canonical JSON") {
    for (ExperimentKind kind :
         {ExperimentKind::Run, ExperimentKind::RateStudy, ExperimentKind::TrapStudy,
          ExperimentKind::EquivCheck, ExperimentKind::Validate}) {
        const ExperimentConfig cfg = default_config(kind);
        const std::string text = config_to_json(cfg);
        const ExperimentConfig back = parse_config(text, kind);
        CHECK(config_to_json(back) == text);
        CHECK(config_digest(back) == config_digest(cfg));
    }
}

TEST_CASE("explicit vectors survive the round trip") {
    ExperimentConfig cfg = default_config(ExperimentKind::Run);
    cfg.theta0 = {1.0, -2.5, 0.25};
    cfg.w0 = {0.5, 0.5, 0.5};
    cfg.dim = 3;
    const ExperimentConfig back = parse_config(config_to_json(cfg), ExperimentKind::Run);
    CHECK(back.theta0 == cfg.theta0);
    CHECK(back.w0 == cfg.w0);
}

TEST_CASE("strict parsing rejects malformed configs") {
    CHECK_THROWS_AS(parse_config("{ not json", ExperimentKind::Run), ConfigError);
    CHECK_THROWS_AS(parse_config("[1,2]", ExperimentKind::Run), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"no_such_key": 1})", ExperimentKind::Run), ConfigError);
    // experiment key must match the requested kind
    CHECK_THROWS_AS(parse_config(R"({"experiment": "validate"})", ExperimentKind::Run),
                    ConfigError);
    // type errors
    CHECK_THROWS_AS(parse_config(R"({"dim": "five"})", ExperimentKind::Run), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"n_steps": 10.5})", ExperimentKind::Run), ConfigError);
    // range errors
    CHECK_THROWS_AS(parse_config(R"({"dim": 0})", ExperimentKind::Run), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"gamma1": -0.5})", ExperimentKind::Run), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"objective": "rosenbrock"})", ExperimentKind::Run),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"setting": "v"})", ExperimentKind::RateStudy), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"cells": [[0.75, 0.5]]})", ExperimentKind::TrapStudy),
                    ConfigError);
    // the saddle objective is two-dimensional by construction
    CHECK_THROWS_AS(parse_config(R"({"objective": "saddle", "dim": 3})", ExperimentKind::Run),
                    ConfigError);
}

TEST_CASE("config digest covers science keys and ignores plumbing") {
    ExperimentConfig cfg = default_config(ExperimentKind::Run);
    const std::string base = config_digest(cfg);
    CHECK(base.size() == 16);
    CHECK(base.find_first_not_of("0123456789abcdef") == std::string::npos);

    ExperimentConfig moved = cfg;
    moved.out_dir = "/tmp/elsewhere";
    moved.workers = 7;
    CHECK(config_digest(moved) == base);  // plumbing must not alter identity

    ExperimentConfig science = cfg;
    science.gamma1 = 0.25;
    CHECK(config_digest(science) != base);
    ExperimentConfig seeded = cfg;
    seeded.base_seed += 1;
    CHECK(config_digest(seeded) != base);
}

TEST_CASE("finite-horizon settings expose their closed-form constants") {
    const Thm2Params i = thm2_setting_params("i", 10, 100);
    CHECK(i.gamma == doctest::Approx(0.01));
    CHECK(i.p == doctest::Approx(0.1));
    CHECK(i.q == doctest::Approx(0.1));
    CHECK(i.sigma_sq == doctest::Approx(1.0));

    const Thm2Params ii = thm2_setting_params("ii", 10, 100);
    CHECK(ii.gamma == doctest::Approx(0.1));
    CHECK(ii.p == doctest::Approx(1.0));
    CHECK(ii.sigma_sq == doctest::Approx(0.01));

    const Thm2Params iii = thm2_setting_params("iii", 10, 100);
    CHECK(iii.gamma == doctest::Approx(1.0 / std::sqrt(1000.0)));
    CHECK(iii.p == doctest::Approx(iii.gamma));

    const Thm2Params iv = thm2_setting_params("iv", 10, 100);
    CHECK(iv.gamma == doctest::Approx(0.1));
    CHECK(iv.p == doctest::Approx(0.1));
    CHECK(iv.sigma_sq == doctest::Approx(0.1));

    CHECK_THROWS_AS(thm2_setting_params("v", 10, 100), ConfigError);
}

TEST_CASE("horizon and oracle cost follow the published scalings") {
    // d = 10, delta = 0.1
    CHECK(thm2_required_n("i", 10, 0.1) == doctest::Approx(1e4));
    CHECK(thm2_required_n("ii", 10, 0.1) == doctest::Approx(1e2));
    CHECK(thm2_required_n("iii", 10, 0.1) == doctest::Approx(1e3));
    CHECK(thm2_required_n("iv", 10, 0.1) == doctest::Approx(1e2));

    CHECK(thm2_cost("i", 10, 0.1) == doctest::Approx(1e4));    // d^2 delta^-2
    CHECK(thm2_cost("ii", 10, 0.1) == doctest::Approx(1e4));   // d delta^-3
    CHECK(thm2_cost("iii", 10, 0.1) == doctest::Approx(1e3));  // d delta^-2
    CHECK(thm2_cost("iv", 10, 0.1) == doctest::Approx(1e3));   // d delta^-2

    // the dimension burden differs across settings: i is quadratic in d
    CHECK(thm2_cost("i", 20, 0.1) == doctest::Approx(4.0 * thm2_cost("i", 10, 0.1)));
    CHECK(thm2_cost("iii", 20, 0.1) == doctest::Approx(2.0 * thm2_cost("iii", 10, 0.1)));
}

TEST_CASE("validate reports assumption checks, regime, and cost table") {
    const ExperimentConfig cfg = default_config(ExperimentKind::Validate);
    const ValidateResult res = validate(cfg);
    CHECK(res.checks.all_pass());
    CHECK(res.regime == schedules::Regime::LocalMinimizer);
    REQUIRE(res.cost_rows.size() == 4);
    for (const auto& row : res.cost_rows) {
        CHECK(row.cost == doctest::Approx(thm2_cost(row.setting, row.d, row.delta)));
        CHECK(row.n_required == doctest::Approx(thm2_required_n(row.setting, row.d, row.delta)));
    }

    ExperimentConfig bad = cfg;
    bad.beta = 0.4;  // sum gamma^2 diverges
    const ValidateResult bad_res = validate(bad);
    CHECK_FALSE(bad_res.checks.all_pass());
    const Check* c = bad_res.checks.find("sum_gamma_sq_converges");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->pass);
    CHECK(bad_res.regime == schedules::Regime::Invalid);
}

TEST_CASE("parallel_for covers every index once and propagates failures") {
    std::vector<int> hits(97, 0);
    parallel_for(97, 4, [&](int i) { hits[static_cast<std::size_t>(i)] += 1; });
    for (int h : hits) CHECK(h == 1);

    std::atomic<int> done{0};
    CHECK_THROWS_AS(parallel_for(16, 3,
                                 [&](int i) {
                                     if (i == 5) throw ExperimentFailure("task 5 exploded");
                                     done.fetch_add(1);
                                 }),
                    ExperimentFailure);
}

TEST_CASE("run_study aggregates seed-ordered records") {
    const ExperimentConfig cfg = parse_config(R"({
        "experiment": "run", "objective": "quadratic", "dim": 3,
        "n_steps": 500, "seeds": 5, "base_seed": 900, "sigma1": 0.1
    })",
                                              ExperimentKind::Run);
    const RunStudyResult res = run_study(cfg);
    REQUIRE(res.records.size() == 5);
    REQUIRE(res.tail_fractions.size() == 5);
    const std::string digest = config_digest(cfg);
    for (std::size_t k = 0; k < res.records.size(); ++k) {
        CHECK(res.records[k].seed == 900 + k);
        CHECK(res.records[k].config_digest == digest);
        CHECK(res.records[k].w_min_seen >= 0.0);
        CHECK(res.tail_fractions[k] >= 0.0);
        CHECK(res.tail_fractions[k] <= 1.0);
    }
    CHECK(res.n_diverged == 0);
    CHECK(res.median_grad_norm_final >= 0.0);
    CHECK(res.median_w_norm_final >= 0.0);
}

TEST_CASE("rate_study fills the grid in (d, N) order") {
    const ExperimentConfig cfg = parse_config(R"({
        "experiment": "rate-study", "dim": 3, "setting": "ii", "w0": 1.0,
        "n_grid": [50, 200], "seeds": 5, "base_seed": 11
    })",
                                              ExperimentKind::RateStudy);
    const RateStudyResult res = rate_study(cfg);
    REQUIRE(res.cells.size() == 2);
    CHECK(res.cells[0].n == 50);
    CHECK(res.cells[1].n == 200);
    for (const auto& c : res.cells) {
        CHECK(c.d == 3);
        CHECK(c.m == 5);
        REQUIRE(c.metrics.size() == 5);
        CHECK(c.metric_mean > 0.0);
        CHECK(c.metric_se > 0.0);
    }
    REQUIRE(res.slopes.size() == 1);
    CHECK(std::isfinite(res.slopes[0].slope));
}

TEST_CASE("a frozen step-size control pins the rate metric") {
    const ExperimentConfig cfg = parse_config(R"({
        "experiment": "rate-study", "dim": 4, "setting": "ii",
        "gamma_override": 0.0, "n_grid": [20, 80], "seeds": 3, "base_seed": 5
    })",
                                              ExperimentKind::RateStudy);
    const RateStudyResult res = rate_study(cfg);
    // theta never moves, so every seed and horizon measures grad_l1sq(theta0):
    // theta0 = ones, curvature 1 -> (sum |theta_i|)^2 = 16.
    for (const auto& c : res.cells) {
        CHECK(c.metric_mean == doctest::Approx(16.0).epsilon(1e-12));
        CHECK(c.metric_se == doctest::Approx(0.0));
    }
    CHECK(res.slopes[0].slope == doctest::Approx(0.0));
}

TEST_CASE("more seeds tighten the rate-study standard error") {
    auto run_with_seeds = [](int m) {
        std::ostringstream ss;
        ss << R"({"experiment": "rate-study", "dim": 3, "setting": "ii", "w0": 1.0,)"
           << R"("n_grid": [100], "seeds": )" << m << R"(, "base_seed": 77})";
        return rate_study(parse_config(ss.str(), ExperimentKind::RateStudy));
    };
    const double se_small = run_with_seeds(40).cells[0].metric_se;
    const double se_big = run_with_seeds(160).cells[0].metric_se;
    // Quadrupling M should halve the SE, up to sampling wobble.
    CHECK(se_big < se_small * 0.75);
    CHECK(se_big > se_small * 0.25);
}

TEST_CASE("equiv_check bounds the parametrization deviation") {
    const ExperimentConfig cfg = default_config(ExperimentKind::EquivCheck);
    const std::vector<EquivRow> rows = equiv_check(cfg);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(row.n_steps == cfg.n_steps);
        CHECK(row.max_deviation >= 0.0);
        CHECK(row.max_deviation <= 1e-9);
    }
    CHECK(rows[0].variant == "constant_one");
    CHECK(rows[1].variant == "constant");
    CHECK(rows[2].variant == "vanishing");

    ExperimentConfig too_long = cfg;
    too_long.n_steps = 200000;
    CHECK_THROWS_AS(equiv_check(too_long), ConfigError);
}

TEST_CASE("trap_study separates guaranteed and invalid cells") {
    const ExperimentConfig cfg = parse_config(R"({
        "experiment": "trap-study",
        "gamma1": 0.05, "eps": 1.0, "sigma1": 0.3, "p1": 1.0, "q_inf": 1.0,
        "cells": [[0.75, 0.5, 0.0], [1.5, 0.0, 0.0]],
        "rho": 1e-3, "n_steps": 20000, "seeds": 40, "base_seed": 1000,
        "override_assumptions": true
    })",
                                              ExperimentKind::TrapStudy);
    const std::vector<PhaseCell> cells = trap_study(cfg);
    REQUIRE(cells.size() == 2);
    const PhaseCell& lm = cells[0];
    const PhaseCell& invalid = cells[1];
    CHECK(lm.predicted == schedules::Regime::LocalMinimizer);
    CHECK(invalid.predicted == schedules::Regime::Invalid);
    REQUIRE(lm.final_abs_y.size() == 40);
    CHECK(lm.n_diverged == 0);
    CHECK(invalid.n_diverged == 0);
    // The guaranteed cell must escape the saddle strictly more often than
    // the invalid cell at matched horizon and replication.
    CHECK(lm.escape_fraction >= 0.8);
    CHECK(invalid.escape_fraction <= 0.05);
    CHECK(lm.escape_fraction > invalid.escape_fraction);
}

TEST_CASE("a noiseless run started exactly at the saddle never escapes") {
    const ExperimentConfig cfg = parse_config(R"({
        "experiment": "trap-study",
        "gamma1": 0.05, "eps": 1.0, "sigma1": 0.0, "p1": 1.0, "q_inf": 1.0,
        "cells": [[0.75, 0.5, 0.0]], "rho": 0.0,
        "n_steps": 5000, "seeds": 3, "base_seed": 60
    })",
                                              ExperimentKind::TrapStudy);
    const std::vector<PhaseCell> cells = trap_study(cfg);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].escape_fraction == 0.0);
    for (double y : cells[0].final_abs_y) CHECK(y == 0.0);  // exact fixed point
}

TEST_CASE("invalid trap cells require the explicit override") {
    const ExperimentConfig cfg = parse_config(R"({
        "experiment": "trap-study", "cells": [[1.5, 0.0, 0.0]],
        "n_steps": 100, "seeds": 2
    })",
                                              ExperimentKind::TrapStudy);
    CHECK_THROWS_AS(trap_study(cfg), ConfigError);
}

TEST_CASE("run_experiment writes the advertised artifacts") {
    const std::filesystem::path out =
        std::filesystem::temp_directory_path() / "adaopt_harness_test_out";
    std::filesystem::remove_all(out);
    ExperimentConfig cfg = parse_config(R"({
        "experiment": "run", "dim": 2, "n_steps": 200, "seeds": 2, "base_seed": 3
    })",
                                        ExperimentKind::Run);
    cfg.out_dir = out.string();
    const ExperimentResult res = run_experiment(cfg);
    CHECK(res.name == "run");
    CHECK(res.config_hash == config_digest(cfg));
    REQUIRE(std::filesystem::exists(res.csv_path));
    REQUIRE(std::filesystem::exists(res.json_path));
    CHECK(slurp(res.csv_path) == res.csv_text);
    CHECK(slurp(res.json_path) == res.summary_json);

    // CSV: commented provenance, then a header, then hash-stamped rows.
    CHECK(res.csv_text.rfind("# experiment: run", 0) == 0);
    CHECK(res.csv_text.find("# config_hash: " + res.config_hash) != std::string::npos);
    CHECK(res.csv_text.find("config_hash,seed,") != std::string::npos);
    CHECK(res.csv_text.find(res.config_hash + ",3,") != std::string::npos);

    // JSON: well-formed, self-describing, carries the embedded config.
    const nlohmann::json doc = nlohmann::json::parse(res.summary_json);
    CHECK(doc.at("experiment") == "run");
    CHECK(doc.at("config_hash") == res.config_hash);
    CHECK(doc.at("config").at("n_steps") == 200);
    CHECK_FALSE(doc.at("config").contains("out"));  // plumbing stays out

    CHECK(res.report_text.find("run:") != std::string::npos);
    std::filesystem::remove_all(out);
}

TEST_CASE("outputs are byte-identical regardless of parallelism") {
    auto render = [](int workers) {
        ExperimentConfig cfg = parse_config(R"({
            "experiment": "rate-study", "dim": 3, "n_grid": [40, 120],
            "seeds": 6, "base_seed": 21, "w0": 1.0
        })",
                                            ExperimentKind::RateStudy);
        cfg.workers = workers;
        return run_experiment(cfg);
    };
    const ExperimentResult serial = render(1);
    const ExperimentResult threaded = render(3);
    CHECK(serial.csv_text == threaded.csv_text);
    CHECK(serial.summary_json == threaded.summary_json);
    CHECK(serial.config_hash == threaded.config_hash);

    const ExperimentResult again = render(3);
    CHECK(again.csv_text == threaded.csv_text);  // and across invocations
}

TEST_CASE("every experiment kind serializes without an output directory") {
    for (ExperimentKind kind :
         {ExperimentKind::Run, ExperimentKind::RateStudy, ExperimentKind::TrapStudy,
          ExperimentKind::EquivCheck, ExperimentKind::Validate}) {
        ExperimentConfig cfg = default_config(kind);
        // shrink the stochastic kinds so the suite stays fast
        cfg.seeds = 2;
        if (kind == ExperimentKind::Run) cfg.n_steps = 100;
        if (kind == ExperimentKind::RateStudy) cfg.n_grid = {30, 60};
        if (kind == ExperimentKind::TrapStudy) cfg.n_steps = 300;
        if (kind == ExperimentKind::EquivCheck) cfg.n_steps = 200;
        const ExperimentResult res = run_experiment(cfg);
        CHECK(res.name == kind_name(kind));
        CHECK(res.csv_path.empty());
        CHECK(res.json_path.empty());
        CHECK_FALSE(res.csv_text.empty());
        CHECK_FALSE(res.report_text.empty());
        CHECK(nlohmann::json::parse(res.summary_json).at("experiment") == kind_name(kind));
    }
}

}  // TEST_SUITE
