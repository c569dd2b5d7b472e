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

#include <unordered_map>
#include <vector>

#include "acesim/circuit.hpp"
#include "acesim/pauli.hpp"
#include "acesim/rng.hpp"

namespace acesim {

/// Breadth-first enumeration of a Clifford group (mod phase) over a native
/// generator set, with minimal-length compiled gate sequences and O(1)
/// inverse lookup. Sizes: 24 for one qubit over {S, sqrt_x}; 11520 for two
/// qubits over {S_0, S_1, sqrt_x_0, sqrt_x_1, CZ}.
class CliffordGroup {
  public:
    /// n = 1 or 2. The enumeration is deterministic (BFS order).
    static const CliffordGroup& instance(int n);

    size_t size() const { return elements_.size(); }
    const CliffordTableau& tableau(size_t index) const { return elements_[index]; }
    /// Native gate sequence compiling element `index` (shortest, BFS order).
    const std::vector<GateOp>& compiled(size_t index) const { return compiled_[index]; }
    size_t index_of(const CliffordTableau& t) const;
    size_t inverse_index(size_t index) const { return inverse_[index]; }
    size_t uniform_index(Rng& rng) const { return rng.below(size()); }

  private:
    explicit CliffordGroup(int n);
    int n_;
    std::vector<CliffordTableau> elements_;
    std::vector<std::vector<GateOp>> compiled_;
    std::vector<size_t> inverse_;
    std::unordered_map<uint64_t, std::vector<size_t>> by_key_;
};

struct RbSequenceSpec {
    int n = 1;               // 1 or 2
    int qubit = 0;           // target qubit for n == 1
    int depth = 1;           // number of random Cliffords before the inverse
    bool interleave_cz = false;
    bool simultaneous_partner = false;  // n == 1: mirror the sequence on the other qubit
};

/// Random Clifford sequence compiled to the native gate set and terminated
/// by the composed inverse, so the noiseless circuit acts as the identity.
/// The circuit is built on a 2-qubit register and ends with measurements.
/// Returns the circuit and the drawn element indices (for reproducibility).
std::pair<Circuit, std::vector<size_t>> rb_sequence(const RbSequenceSpec& spec, Rng& rng);

/// Total native-gate count of a compiled Clifford element (reported because
/// compiled length affects the effective per-Clifford decay).
size_t compiled_length(int n, size_t index);

}  // namespace acesim
