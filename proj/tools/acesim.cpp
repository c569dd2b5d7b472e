// Copyright 2026 The acesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "acesim/cli_commands.hpp"

using namespace acesim;

int main(int argc, char** argv) {
    CLI::App app{"ACES noise-characterization toolkit for a two-qubit Clifford gate set"};
    app.require_subcommand(1);

    struct SubSpec {
        std::string name;
        std::string help;
        std::function<int(const ExperimentConfig&)> run;
    };
    const std::vector<SubSpec> subs = {
        {"twirl-demo", "sweep injected CZ rotations with and without twirling", cmd_twirl_demo},
        {"confusion-demo", "confusion matrices with and without measurement twirling",
         cmd_confusion_demo},
        {"aces-run", "full ACES pipeline: design pool, eigenvalues, 250 fits", cmd_aces_run},
        {"appendix-models", "out-of-model error study and optimizer comparison",
         cmd_appendix_models},
        {"rb", "randomized benchmarking: 1q individual/simultaneous, 2q reference/interleaved",
         cmd_rb},
    };

    struct Opts {
        std::string config_path;
        std::string out_dir;
        uint64_t seed = 0;
        uint64_t shots = 0;
        int threads = 0;
        bool seed_set = false, shots_set = false, out_set = false, threads_set = false;
    };
    std::vector<Opts> opts(subs.size());
    std::vector<CLI::App*> apps;
    for (size_t i = 0; i < subs.size(); ++i) {
        CLI::App* sub = app.add_subcommand(subs[i].name, subs[i].help);
        sub->add_option("--config", opts[i].config_path, "JSON config file");
        sub->add_option("--seed", opts[i].seed, "root seed (overrides config)")
            ->each([&opts, i](const std::string&) { opts[i].seed_set = true; });
        sub->add_option("--shots", opts[i].shots, "shots per circuit (overrides config)")
            ->each([&opts, i](const std::string&) { opts[i].shots_set = true; });
        sub->add_option("--out", opts[i].out_dir, "output directory (overrides config)")
            ->each([&opts, i](const std::string&) { opts[i].out_set = true; });
        sub->add_option("--threads", opts[i].threads, "worker threads (overrides config)")
            ->each([&opts, i](const std::string&) { opts[i].threads_set = true; });
        apps.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    for (size_t i = 0; i < subs.size(); ++i) {
        if (!apps[i]->parsed()) continue;
        try {
            ExperimentConfig cfg =
                opts[i].config_path.empty()
                    ? ExperimentConfig::from_json_text("{}", subs[i].name)
                    : ExperimentConfig::from_json_file(opts[i].config_path, subs[i].name);
            if (opts[i].seed_set) cfg.seed = opts[i].seed;
            if (opts[i].shots_set) cfg.shots = opts[i].shots;
            if (opts[i].out_set) cfg.out_dir = opts[i].out_dir;
            if (opts[i].threads_set) cfg.threads = opts[i].threads;
            return subs[i].run(cfg);
        } catch (const ConfigError& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 2;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 3;
        }
    }
    return 2;
}
