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
#include <vector>

#include "acesim/channel.hpp"
#include "acesim/circuit.hpp"
#include "acesim/noise_model.hpp"

namespace acesim {

/// Probabilities (and optionally counts) over 2^n computational bitstrings;
/// qubit 0 is the most significant bit.
struct OutcomeDistribution {
    int n = 0;
    std::vector<double> probs;
    std::vector<uint64_t> counts;  // empty unless sampled
    uint64_t shots = 0;

    double p(uint64_t bits) const { return probs[bits]; }
    /// Expectation of (-1)^{parity of bits within `mask`}.
    double parity_expectation(uint64_t mask) const;
};

struct RunOptions {
    std::vector<GateOp> prep_ops;   // noiseless state preparation
    std::vector<GateOp> basis_ops;  // noiseless measurement basis changes
    bool gate_twirl = false;        // G-twisted twirl of every CZ
    bool measurement_twirl = false;
    /// Exact path only: analytically twirl the injected CZ rotations and the
    /// measurement-error channels instead of sampling frames.
    int threads = 0;  // run_shots only; 0 = default
};

/// Exact dense Pauli-vector propagation: prep ops, then per gate the ideal
/// PTM followed by the gate's noise channel, then SPAM channels, then basis
/// changes, then the measurement-error channel (twirled form when
/// measurement_twirl is set). With gate_twirl set, injected CZ rotations are
/// replaced by their Pauli-twirled channels. Returns confusion-adjusted
/// probabilities.
OutcomeDistribution run_exact(const Circuit& c, const NoiseModel& nm,
                              const RunOptions& opts = {});

/// Monte-Carlo shot sampling. With twirling enabled, every shot draws a fresh
/// TwirlInstance (new CZ Pauli pairs, new measurement Paulis), simulates that
/// instance exactly, samples one outcome and applies the classical flips.
/// Shots are deterministic given `seed` regardless of thread count.
OutcomeDistribution run_shots(const Circuit& c, const NoiseModel& nm, uint64_t shots,
                              uint64_t seed, const RunOptions& opts = {});

/// Noisy readout: p~_i = sum_j C_ji p_j, per-qubit confusions applied as a
/// tensor product.
OutcomeDistribution apply_confusion(const OutcomeDistribution& dist,
                                    const std::vector<ConfusionMatrix>& per_qubit);
OutcomeDistribution apply_confusion(const OutcomeDistribution& dist,
                                    const ConfusionMatrix& joint);

/// Measurement error mitigation: applies (C^T)^{-1} to the observed
/// probabilities. Mitigated values may be slightly negative; they are
/// reported as-is unless `clip` is set. Throws if C is singular or has
/// 1-norm condition number above 1e6.
OutcomeDistribution mem_mitigate(const OutcomeDistribution& dist, const ConfusionMatrix& joint,
                                 bool clip = false, bool* warned_negative = nullptr);

/// Empirical confusion matrix: prepares every computational basis state
/// exactly (calibration isolates measurement error), runs the measurement
/// chain with or without measurement twirling, and tallies outcomes.
ConfusionMatrix estimate_confusion(const NoiseModel& nm, uint64_t shots_per_state,
                                   uint64_t seed, bool twirl_measurement);

/// Exact confusion matrix of the model's measurement chain (tensor product
/// of per-qubit confusions; twirled variant symmetrizes each factor).
ConfusionMatrix exact_confusion(const NoiseModel& nm, bool twirl_measurement);

/// Single-qubit marginal of a joint confusion matrix, averaging over the
/// other qubits' true states.
ConfusionMatrix marginal_confusion(const ConfusionMatrix& joint, int qubit);

int default_threads();

}  // namespace acesim
