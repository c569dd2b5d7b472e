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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "acesim/channel.hpp"
#include "acesim/circuit.hpp"

namespace acesim {

/// The seven fitted channels of the two-qubit device model, in parameter
/// order. One-qubit gate channels carry 3 free parameters, CZ 15, SPAM 3 per
/// qubit: 4*3 + 15 + 2*3 = 33.
enum class Channel7 : int {
    SqrtX0 = 0,
    SqrtX1 = 1,
    S0 = 2,
    S1 = 3,
    CZ = 4,
    Spam0 = 5,
    Spam1 = 6,
};

inline constexpr int kNumParams = 33;
inline constexpr std::array<int, 7> kChannelParamBase = {0, 3, 6, 9, 12, 27, 30};
inline constexpr std::array<int, 7> kChannelParamCount = {3, 3, 3, 3, 15, 3, 3};

std::string channel7_name(Channel7 c);
Channel7 channel7_from_name(const std::string& s);
int channel7_qubits(Channel7 c);  // 1 or 2

/// Column label for parameter k: channel plus the non-identity Pauli symbol
/// on its support ("sqrt_x_0:Y", "cz:ZX", ...).
std::string param_label(int k);

/// Device noise model: per-gate Pauli channels, per-qubit SPAM channels
/// (applied after the circuit, before basis changes), optional per-qubit
/// measurement-error PTMs (applied right before measurement, inside the
/// measurement twirl), and optional per-qubit preparation bit-flips.
/// The 33-parameter fit model covers the channels only; prep flips and
/// measurement error are out-of-model by design.
struct NoiseModel {
    PauliChannel sqrt_x0, sqrt_x1, s0, s1;  // 1-qubit channels
    PauliChannel cz;                        // 2-qubit channel
    PauliChannel spam0, spam1;              // 1-qubit SPAM channels
    std::array<std::optional<Ptm>, 2> meas_error;  // per qubit
    std::array<double, 2> prep_flip = {0.0, 0.0};

    static NoiseModel noiseless();
    /// Published gate-error table (asymmetric depolarizing model calibrated
    /// from hardware). Rows are renormalized by rescaling the non-identity
    /// rates to 1 - p_identity; `renorm_warning` receives a description per
    /// adjusted row when non-null.
    static NoiseModel appendix_table(std::vector<std::string>* renorm_warnings = nullptr);

    const PauliChannel& channel(Channel7 c) const;
    PauliChannel& channel(Channel7 c);
    /// Channel attached to a gate op, if any (Rz and Measure carry none).
    const PauliChannel* channel_for_op(const GateOp& op) const;

    /// Pack/unpack of the 33 non-identity probabilities in parameter order.
    std::array<double, kNumParams> to_params() const;
    static NoiseModel from_params(const std::array<double, kNumParams>& p);
    /// Eigenvalues of all seven channels at the 33 non-identity positions.
    std::array<double, kNumParams> to_eigenvalues() const;

    std::string to_json() const;
    static NoiseModel from_json(const std::string& text);

    void validate();
};

/// Exact confusion matrix of one qubit's measurement error (identity if the
/// model has none). `twirled` selects the measurement-twirled (symmetrized)
/// channel.
ConfusionMatrix qubit_confusion(const NoiseModel& nm, int qubit, bool twirled);

}  // namespace acesim
