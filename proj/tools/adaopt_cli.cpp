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

/**
 * @file adaopt_cli.cpp
 * @brief Command-line front end for the adaopt shared library.
 *
 * Exit codes: 0 on success, 1 on runtime failure, 2 on usage or
 * configuration problems.
 */

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <adaopt/adaopt.h>

namespace {

struct SubOptions {
    std::string config_path;
    std::string out_dir = "out";
    int seeds = 0;    // 0: keep the config's value
    int workers = 0;  // 0: keep the config's value
    bool override_assumptions = false;
};

constexpr const char* kKinds[] = {"run", "rate-study", "trap-study", "equiv-check",
                                  "validate"};

constexpr const char* kKindHelp[] = {
    "Monte Carlo runs of the adaptive method on one configuration",
    "mean rate metric over an N-grid with a log-log slope fit",
    "escape fractions near the saddle across (beta, r, s) cells",
    "maximum deviation between historical and rescaled updates",
    "schedule assumption checks, regime label, and oracle cost table"};

int run_subcommand(const char* kind, const SubOptions& opt, const CLI::App& sub) {
    if (opt.config_path.empty()) {
        std::cerr << "missing required --config FILE\n\n" << sub.help() << std::flush;
        return 2;
    }
    std::ifstream in(opt.config_path, std::ios::binary);
    if (!in) {
        std::cerr << "config error: cannot read '" << opt.config_path << "'\n";
        return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string config_json = buf.str();

    adaopt_experiment* exp = nullptr;
    const adaopt_status st =
        adaopt_experiment_run(kind, config_json.c_str(), opt.out_dir.c_str(), opt.seeds,
                              opt.workers, opt.override_assumptions ? 1 : 0, &exp);
    if (st == ADAOPT_ERR_CONFIG) {
        std::cerr << "config error: " << adaopt_last_error() << "\n";
        return 2;
    }
    if (st != ADAOPT_OK) {
        std::cerr << "error: " << adaopt_last_error() << "\n";
        return 1;
    }
    std::cout << adaopt_experiment_report_text(exp);
    std::cout << "results written to " << opt.out_dir << "/" << kind << ".csv and "
              << opt.out_dir << "/" << kind << ".json\n";
    adaopt_experiment_destroy(exp);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaopt: adaptive stochastic optimization experiments"};
    app.set_version_flag("--version", std::string(adaopt_version()));
    app.require_subcommand(0, 1);

    SubOptions opts[5];
    CLI::App* subs[5];
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(kKinds[i], kKindHelp[i]);
        sub->add_option("--config", opts[i].config_path, "JSON configuration file");
        sub->add_option("--out", opts[i].out_dir, "output directory")
            ->capture_default_str();
        sub->add_option("--seeds", opts[i].seeds, "override the number of seeds");
        sub->add_option("--workers", opts[i].workers, "override the worker count");
        sub->add_flag("--override-assumptions", opts[i].override_assumptions,
                      "run even when schedule assumption checks fail");
        subs[i] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }

    for (int i = 0; i < 5; ++i) {
        if (subs[i]->parsed()) {
            return run_subcommand(kKinds[i], opts[i], *subs[i]);
        }
    }
    std::cerr << app.help() << std::flush;
    return 2;
}
