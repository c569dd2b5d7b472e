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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acesim/noise_model.hpp"

namespace acesim {

/// Raised for malformed configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised for numerical failures such as rank budgets or singular matrices
/// (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One JSON document per run. Fields missing from the file keep the preset's
/// defaults; --seed/--shots/--out override the file.
struct ExperimentConfig {
    std::string preset;
    uint64_t seed = 1;
    uint64_t shots = 10000;
    std::string out_dir = "out";
    int threads = 0;

    // noise model source: "noiseless" | "appendix-table" | "inline" | "file"
    std::string noise_source = "appendix-table";
    std::string noise_file;
    std::optional<NoiseModel> inline_model;

    // measurement / preparation extras applied on top of the source
    bool readout_bitflip = false;   // p_M0 = 0.02, p_M1 = 0.05
    bool prep_bitflip = false;      // p_R0 = 0.019, p_R1 = 0.024
    std::optional<double> damping_gamma;
    double damping_beta = 1.0;

    std::vector<double> delta_theta;  // injected CZ rotations (radians)
    int injection_target = 1;

    // design policy
    int cz_min = 3;
    int cz_max = 5;
    int pool_target = 95;
    int num_design_sets = 250;

    uint64_t calibration_shots = 10000;
    std::string optimizer = "bound-constrained";  // or "least-squares-tvd"

    // twirl-demo
    int dtheta_points = 25;
    std::vector<int> n_cz_values = {1, 11};

    // appendix-models
    std::vector<uint64_t> shot_grid = {100, 316, 1000, 3162, 10000, 31623, 100000};
    int sets_per_level = 50;

    // rb
    std::vector<int> rb_depths_1q = {1, 4, 8, 16, 32, 64, 128};
    std::vector<int> rb_depths_2q = {1, 2, 4, 6, 9, 13, 18, 24};
    int rb_circuits_per_depth = 10;
    uint64_t rb_shots = 256;

    static ExperimentConfig from_json_file(const std::string& path, const std::string& preset);
    static ExperimentConfig from_json_text(const std::string& text, const std::string& preset);

    /// Model assembled from the source plus the extras.
    NoiseModel build_model(std::vector<std::string>* warnings = nullptr) const;
};

int cmd_twirl_demo(const ExperimentConfig& config);
int cmd_confusion_demo(const ExperimentConfig& config);
int cmd_aces_run(const ExperimentConfig& config);
int cmd_appendix_models(const ExperimentConfig& config);
int cmd_rb(const ExperimentConfig& config);

}  // namespace acesim
