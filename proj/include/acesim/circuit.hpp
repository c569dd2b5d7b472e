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

#include <optional>
#include <string>
#include <vector>

#include "acesim/pauli.hpp"
#include "acesim/rng.hpp"

namespace acesim {

enum class GateKind { SqrtX, S, Rz, CZ, Measure };

std::string gate_kind_name(GateKind k);
GateKind gate_kind_from_name(const std::string& s);

/// One gate-set operation. CZ ops may carry an injected coherent Rz error
/// (angle + target qubit) applied immediately after the bare gate.
struct GateOp {
    GateKind kind;
    std::vector<int> qubits;           // 1 qubit, or 2 distinct for CZ
    double angle = 0.0;                // Rz only
    std::optional<double> injected_rz; // CZ only
    int injected_target = -1;          // CZ only, must be in `qubits`

    static GateOp sqrt_x(int q) { return {GateKind::SqrtX, {q}, 0.0, std::nullopt, -1}; }
    static GateOp s(int q) { return {GateKind::S, {q}, 0.0, std::nullopt, -1}; }
    static GateOp rz(int q, double angle) { return {GateKind::Rz, {q}, angle, std::nullopt, -1}; }
    static GateOp cz(int q0, int q1) { return {GateKind::CZ, {q0, q1}, 0.0, std::nullopt, -1}; }
    static GateOp measure(int q) { return {GateKind::Measure, {q}, 0.0, std::nullopt, -1}; }

    void validate(int n) const;
};

/// Ordered gate list with optional layer boundaries (indices into `ops` where
/// a new layer starts). Measurement ops, when present, must be terminal.
struct Circuit {
    int n = 0;
    std::vector<GateOp> ops;
    std::vector<size_t> layers;

    explicit Circuit(int n_ = 0) : n(n_) {}

    void append(GateOp op);
    void start_layer() { layers.push_back(ops.size()); }
    int count_kind(GateKind k) const;
    void validate() const;

    std::string to_json() const;
    static Circuit from_json(const std::string& text);
};

/// One sampled Pauli frame for a circuit: a (before, after) two-qubit Pauli
/// pair per CZ with after = CZ before CZ^dag, and a per-qubit measurement
/// Pauli with its classical flip bit (set iff the Pauli is X or Y).
struct TwirlInstance {
    struct CzTwirl {
        size_t op_index;
        PauliString before;  // on the CZ's two qubits, in op order
        PauliString after;
    };
    std::vector<CzTwirl> cz_twirls;
    std::vector<int> measure_paulis;  // digit per qubit, 0..3
    std::vector<bool> flips;          // per qubit

    /// Lookup-table consistency: after == CZ before CZ^dag for every entry.
    bool consistent() const;
};

/// Fresh uniform twirl for every CZ and every measured qubit.
/// `twirl_measurements` controls whether measurement Paulis are drawn
/// (otherwise identity / no flips).
TwirlInstance sample_twirl(const Circuit& c, Rng& rng, bool twirl_measurements = true);

/// Set injected_rz = delta_theta on every CZ (overwriting any previous
/// value). Throws if `target` does not participate in each CZ.
Circuit inject_coherent_error(const Circuit& c, double delta_theta, int target);

/// Gate-set compilation of Pauli eigenstate preparation and measurement
/// basis changes.
///   prep:  |0..0> -> +1 product eigenstate of input_p
///          (Z/I: none; X: [sqrt_x, s]; Y: [sqrt_x, s, s])
///   basis: maps output_p's X/Y components to +Z before computational
///          measurement (X: [s, sqrt_x]; Y: [sqrt_x])
struct PrepBasis {
    std::vector<GateOp> prep_ops;
    std::vector<GateOp> basis_ops;
};
PrepBasis prep_and_basis_circuits(const PauliString& input_p, const PauliString& output_p);

/// Tableau of a Clifford gate op. Rz is accepted only at multiples of pi/2
/// (within 1e-9); other angles throw.
CliffordTableau tableau_of_op(const GateOp& op, int n);

/// Tableau of a whole circuit (Measure ops ignored).
CliffordTableau tableau_of_circuit(const Circuit& c);

}  // namespace acesim
