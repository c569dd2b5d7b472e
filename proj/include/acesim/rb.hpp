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

#include <vector>

#include "acesim/clifford_group.hpp"
#include "acesim/noise_model.hpp"
#include "acesim/simulator.hpp"

namespace acesim {

/// Exponential decay fit P = B * alpha^N + asymptote with a fixed asymptote
/// (0.5 for one qubit, 0.25 for two).
struct DecayFit {
    double amplitude = 0.0;  // B
    double alpha = 1.0;
    double asymptote = 0.5;
    double cov_bb = 0.0, cov_ba = 0.0, cov_aa = 0.0;
    double alpha_stderr() const;
};

/// Nonlinear least squares on B * alpha^N + asymptote. Initialization: B from
/// the first point, alpha from a log-linear regression on (survival -
/// asymptote). Throws if fewer than 3 distinct depths or if every survival
/// sits at or below the asymptote.
DecayFit fit_decay(const std::vector<double>& depths, const std::vector<double>& survival,
                   double asymptote);

/// F1 = 1 - (1 - alpha)/2.
double fidelity_1q(double alpha);

/// F_CZ = 1 - (3/4)(1 - alpha_int / alpha_ref). alpha_int > alpha_ref is
/// allowed (statistical); alpha_ref must be nonzero.
double fidelity_irb(double alpha_int, double alpha_ref);

/// First-order uncertainty propagation through fidelity_irb from the two fit
/// variances.
double fidelity_irb_stderr(const DecayFit& fit_int, const DecayFit& fit_ref);

struct RbConfig {
    int n = 1;   // 1 or 2
    int qubit = 0;
    bool simultaneous = false;   // n == 1: drive both qubits
    bool interleave_cz = false;  // n == 2
    double injected_rz = 0.0;    // coherent rotation on every CZ
    int injection_target = 1;
    std::vector<int> depths;
    int circuits_per_depth = 20;
    uint64_t shots = 256;
    uint64_t seed = 1;
    int threads = 0;
};

struct RbResult {
    std::vector<int> depths;
    std::vector<double> mean_survival;
    std::vector<double> std_survival;
    DecayFit fit;
    double mean_compiled_gates = 0.0;  // native gates per Clifford, reported
};

/// Drives rb_sequence + run_shots (twirled CZs, measurement twirling on, so
/// the decays saturate at 0.5 / 0.25) and fits the decay.
RbResult run_rb_experiment(const NoiseModel& nm, const RbConfig& config);

}  // namespace acesim
