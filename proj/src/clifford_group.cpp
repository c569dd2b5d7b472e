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

#include "acesim/clifford_group.hpp"

#include <deque>
#include <stdexcept>

namespace acesim {

namespace {

std::vector<GateOp> generators_for(int n) {
    if (n == 1) return {GateOp::s(0), GateOp::sqrt_x(0)};
    if (n == 2)
        return {GateOp::s(0), GateOp::s(1), GateOp::sqrt_x(0), GateOp::sqrt_x(1),
                GateOp::cz(0, 1)};
    throw std::invalid_argument("Clifford enumeration supports n = 1 or 2");
}

}  // namespace

CliffordGroup::CliffordGroup(int n) : n_(n) {
    const auto gens = generators_for(n);
    std::vector<CliffordTableau> gen_tabs;
    gen_tabs.reserve(gens.size());
    for (const auto& g : gens) gen_tabs.push_back(tableau_of_op(g, n));

    auto find = [this](const CliffordTableau& t) -> long {
        auto it = by_key_.find(t.key());
        if (it == by_key_.end()) return -1;
        for (size_t idx : it->second) {
            if (elements_[idx] == t) return static_cast<long>(idx);
        }
        return -1;
    };

    elements_.push_back(CliffordTableau::identity(n));
    compiled_.push_back({});
    by_key_[elements_[0].key()].push_back(0);

    std::deque<size_t> frontier{0};
    while (!frontier.empty()) {
        const size_t cur = frontier.front();
        frontier.pop_front();
        for (size_t g = 0; g < gens.size(); ++g) {
            CliffordTableau next = CliffordTableau::compose(elements_[cur], gen_tabs[g]);
            if (find(next) >= 0) continue;
            std::vector<GateOp> seq = compiled_[cur];
            seq.push_back(gens[g]);
            elements_.push_back(next);
            compiled_.push_back(std::move(seq));
            by_key_[elements_.back().key()].push_back(elements_.size() - 1);
            frontier.push_back(elements_.size() - 1);
        }
    }

    const size_t expect = (n == 1) ? 24 : 11520;
    if (elements_.size() != expect)
        throw std::logic_error("Clifford enumeration produced an unexpected group size");

    inverse_.resize(elements_.size());
    for (size_t i = 0; i < elements_.size(); ++i) {
        const long inv = find(elements_[i].inverse());
        if (inv < 0) throw std::logic_error("inverse not found in enumeration");
        inverse_[i] = static_cast<size_t>(inv);
    }
}

const CliffordGroup& CliffordGroup::instance(int n) {
    static const CliffordGroup g1(1);
    static const CliffordGroup g2(2);
    if (n == 1) return g1;
    if (n == 2) return g2;
    throw std::invalid_argument("Clifford enumeration supports n = 1 or 2");
}

size_t CliffordGroup::index_of(const CliffordTableau& t) const {
    auto it = by_key_.find(t.key());
    if (it != by_key_.end()) {
        for (size_t idx : it->second) {
            if (elements_[idx] == t) return idx;
        }
    }
    throw std::invalid_argument("tableau not in enumerated group");
}

namespace {

// Remap the qubit of a compiled single-qubit sequence.
void append_on_qubit(Circuit& c, const std::vector<GateOp>& seq, int qubit) {
    for (GateOp op : seq) {
        op.qubits[0] = qubit;
        c.append(std::move(op));
    }
}

}  // namespace

std::pair<Circuit, std::vector<size_t>> rb_sequence(const RbSequenceSpec& spec, Rng& rng) {
    if (spec.depth < 1) throw std::invalid_argument("RB depth must be >= 1");
    const CliffordGroup& group = CliffordGroup::instance(spec.n);
    Circuit c(2);
    std::vector<size_t> drawn;
    drawn.reserve(static_cast<size_t>(spec.depth));

    CliffordTableau net = CliffordTableau::identity(spec.n);
    CliffordTableau partner_net = CliffordTableau::identity(1);
    const CliffordTableau cz_tab =
        (spec.n == 2) ? CliffordTableau::cz(2, 0, 1) : CliffordTableau::identity(1);

    for (int d = 0; d < spec.depth; ++d) {
        const size_t idx = group.uniform_index(rng);
        drawn.push_back(idx);
        c.start_layer();
        if (spec.n == 1) {
            append_on_qubit(c, group.compiled(idx), spec.qubit);
            if (spec.simultaneous_partner) {
                // Simultaneous RB draws an independent Clifford on the partner.
                const size_t pidx = group.uniform_index(rng);
                append_on_qubit(c, group.compiled(pidx), 1 - spec.qubit);
                partner_net = CliffordTableau::compose(partner_net, group.tableau(pidx));
            }
        } else {
            for (const auto& op : group.compiled(idx)) c.append(op);
        }
        net = CliffordTableau::compose(net, group.tableau(idx));
        if (spec.interleave_cz) {
            if (spec.n != 2) throw std::invalid_argument("interleaved CZ requires n = 2");
            c.start_layer();
            c.append(GateOp::cz(0, 1));
            net = CliffordTableau::compose(net, cz_tab);
        }
    }

    const size_t inv_idx = group.index_of(net.inverse());
    c.start_layer();
    if (spec.n == 1) {
        append_on_qubit(c, group.compiled(inv_idx), spec.qubit);
        if (spec.simultaneous_partner) {
            const size_t pinv = group.index_of(partner_net.inverse());
            append_on_qubit(c, group.compiled(pinv), 1 - spec.qubit);
        }
    } else {
        for (const auto& op : group.compiled(inv_idx)) c.append(op);
    }

    c.append(GateOp::measure(0));
    c.append(GateOp::measure(1));
    return {std::move(c), std::move(drawn)};
}

size_t compiled_length(int n, size_t index) {
    return CliffordGroup::instance(n).compiled(index).size();
}

}  // namespace acesim
