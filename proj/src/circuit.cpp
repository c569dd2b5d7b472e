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

#include "acesim/circuit.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace acesim {

using nlohmann::json;

std::string gate_kind_name(GateKind k) {
    switch (k) {
        case GateKind::SqrtX: return "sqrt_x";
        case GateKind::S: return "s";
        case GateKind::Rz: return "rz";
        case GateKind::CZ: return "cz";
        case GateKind::Measure: return "measure";
    }
    throw std::logic_error("unreachable");
}

GateKind gate_kind_from_name(const std::string& s) {
    if (s == "sqrt_x") return GateKind::SqrtX;
    if (s == "s") return GateKind::S;
    if (s == "rz") return GateKind::Rz;
    if (s == "cz") return GateKind::CZ;
    if (s == "measure") return GateKind::Measure;
    throw std::invalid_argument("unknown gate kind: " + s);
}

void GateOp::validate(int n) const {
    const size_t want = (kind == GateKind::CZ) ? 2 : 1;
    if (qubits.size() != want) throw std::invalid_argument("wrong qubit count for gate");
    for (int q : qubits) {
        if (q < 0 || q >= n) throw std::invalid_argument("qubit index out of range");
    }
    if (kind == GateKind::CZ && qubits[0] == qubits[1])
        throw std::invalid_argument("CZ qubits must be distinct");
    if (injected_rz.has_value()) {
        if (kind != GateKind::CZ)
            throw std::invalid_argument("injected rotation is only valid on CZ");
        if (injected_target != qubits[0] && injected_target != qubits[1])
            throw std::invalid_argument("injected rotation target not in CZ support");
    }
}

void Circuit::append(GateOp op) {
    op.validate(n);
    if (!ops.empty() && ops.back().kind == GateKind::Measure && op.kind != GateKind::Measure)
        throw std::invalid_argument("no mid-circuit measurements");
    ops.push_back(std::move(op));
}

int Circuit::count_kind(GateKind k) const {
    int c = 0;
    for (const auto& op : ops)
        if (op.kind == k) ++c;
    return c;
}

void Circuit::validate() const {
    bool measuring = false;
    for (const auto& op : ops) {
        op.validate(n);
        if (op.kind == GateKind::Measure) measuring = true;
        else if (measuring) throw std::invalid_argument("no mid-circuit measurements");
    }
}

std::string Circuit::to_json() const {
    json ops_j = json::array();
    for (const auto& op : ops) {
        json o;
        o["gate"] = gate_kind_name(op.kind);
        o["qubits"] = op.qubits;
        if (op.kind == GateKind::Rz) o["angle"] = op.angle;
        if (op.injected_rz.has_value()) {
            o["injected_rz"] = *op.injected_rz;
            o["injected_target"] = op.injected_target;
        }
        ops_j.push_back(std::move(o));
    }
    json j;
    j["n"] = n;
    j["ops"] = std::move(ops_j);
    j["layers"] = layers;
    return j.dump();
}

Circuit Circuit::from_json(const std::string& text) {
    const json j = json::parse(text);
    Circuit c(j.at("n").get<int>());
    for (const auto& o : j.at("ops")) {
        GateOp op;
        op.kind = gate_kind_from_name(o.at("gate").get<std::string>());
        op.qubits = o.at("qubits").get<std::vector<int>>();
        if (o.contains("angle")) op.angle = o.at("angle").get<double>();
        if (o.contains("injected_rz")) {
            op.injected_rz = o.at("injected_rz").get<double>();
            op.injected_target = o.at("injected_target").get<int>();
        }
        c.append(std::move(op));
    }
    if (j.contains("layers")) c.layers = j.at("layers").get<std::vector<size_t>>();
    return c;
}

bool TwirlInstance::consistent() const {
    for (const auto& t : cz_twirls) {
        const CliffordTableau cz2 = CliffordTableau::cz(2, 0, 1);
        auto [after, sign] = cz2.conjugate(t.before);
        (void)sign;  // applied Paulis are gates; the global sign is a phase
        if (!(after == t.after)) return false;
    }
    return true;
}

TwirlInstance sample_twirl(const Circuit& c, Rng& rng, bool twirl_measurements) {
    static const CliffordTableau cz2 = CliffordTableau::cz(2, 0, 1);
    TwirlInstance inst;
    for (size_t i = 0; i < c.ops.size(); ++i) {
        if (c.ops[i].kind != GateKind::CZ) continue;
        TwirlInstance::CzTwirl t;
        t.op_index = i;
        t.before = PauliString::from_index(2, rng.below(16));
        t.after = cz2.conjugate(t.before).first;
        inst.cz_twirls.push_back(t);
    }
    const bool measured = c.count_kind(GateKind::Measure) > 0;
    if (twirl_measurements && measured) {
        inst.measure_paulis.assign(static_cast<size_t>(c.n), 0);
        inst.flips.assign(static_cast<size_t>(c.n), false);
        for (const auto& op : c.ops) {
            if (op.kind != GateKind::Measure) continue;
            const int q = op.qubits[0];
            const int d = static_cast<int>(rng.below(4));
            inst.measure_paulis[static_cast<size_t>(q)] = d;
            inst.flips[static_cast<size_t>(q)] = (d == 1 || d == 2);  // X or Y
        }
    }
    return inst;
}

Circuit inject_coherent_error(const Circuit& c, double delta_theta, int target) {
    Circuit out = c;
    for (auto& op : out.ops) {
        if (op.kind != GateKind::CZ) continue;
        if (op.qubits[0] != target && op.qubits[1] != target)
            throw std::invalid_argument("injection target not in CZ support");
        op.injected_rz = delta_theta;
        op.injected_target = target;
    }
    return out;
}

PrepBasis prep_and_basis_circuits(const PauliString& input_p, const PauliString& output_p) {
    if (input_p.n != output_p.n) throw std::invalid_argument("Pauli dimension mismatch");
    PrepBasis pb;
    for (int q = 0; q < input_p.n; ++q) {
        switch (input_p.digit(q)) {
            case 1:  // |+> = S . sqrt_x |0>
                pb.prep_ops.push_back(GateOp::sqrt_x(q));
                pb.prep_ops.push_back(GateOp::s(q));
                break;
            case 2:  // |+i> = S . S . sqrt_x |0>
                pb.prep_ops.push_back(GateOp::sqrt_x(q));
                pb.prep_ops.push_back(GateOp::s(q));
                pb.prep_ops.push_back(GateOp::s(q));
                break;
            default: break;  // I or Z: |0> is already the +1 eigenstate
        }
    }
    for (int q = 0; q < output_p.n; ++q) {
        switch (output_p.digit(q)) {
            case 1:  // X -> +Z under conjugation by sqrt_x . s
                pb.basis_ops.push_back(GateOp::s(q));
                pb.basis_ops.push_back(GateOp::sqrt_x(q));
                break;
            case 2:  // Y -> +Z under conjugation by sqrt_x
                pb.basis_ops.push_back(GateOp::sqrt_x(q));
                break;
            default: break;
        }
    }
    return pb;
}

CliffordTableau tableau_of_op(const GateOp& op, int n) {
    switch (op.kind) {
        case GateKind::SqrtX: return CliffordTableau::sqrt_x(n, op.qubits[0]);
        case GateKind::S: return CliffordTableau::s_gate(n, op.qubits[0]);
        case GateKind::CZ: return CliffordTableau::cz(n, op.qubits[0], op.qubits[1]);
        case GateKind::Rz: {
            const double quarter = op.angle / (M_PI / 2.0);
            const long k = std::lround(quarter);
            if (std::abs(quarter - static_cast<double>(k)) > 1e-9)
                throw std::invalid_argument("Rz angle is not Clifford");
            CliffordTableau t = CliffordTableau::identity(n);
            const CliffordTableau s = CliffordTableau::s_gate(n, op.qubits[0]);
            for (long i = 0; i < ((k % 4) + 4) % 4; ++i) t = CliffordTableau::compose(t, s);
            return t;
        }
        case GateKind::Measure:
            throw std::invalid_argument("measurement has no tableau");
    }
    throw std::logic_error("unreachable");
}

CliffordTableau tableau_of_circuit(const Circuit& c) {
    CliffordTableau t = CliffordTableau::identity(c.n);
    for (const auto& op : c.ops) {
        if (op.kind == GateKind::Measure) continue;
        t = CliffordTableau::compose(t, tableau_of_op(op, c.n));
    }
    return t;
}

}  // namespace acesim
