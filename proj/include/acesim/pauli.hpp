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
#include <string>
#include <vector>

namespace acesim {

/// Phase-free n-qubit Pauli string in symplectic (X-bits, Z-bits) form.
/// Per-qubit symbols map to bit pairs as I=(0,0), X=(1,0), Y=(1,1), Z=(0,1).
/// The canonical index is base-4 with digits I=0, X=1, Y=2, Z=3 and qubit 0
/// as the most significant digit, giving a stable 0..4^n-1 ordering.
struct PauliString {
    int n = 0;
    uint32_t x_bits = 0;
    uint32_t z_bits = 0;

    PauliString() = default;
    PauliString(int n_, uint32_t x, uint32_t z) : n(n_), x_bits(x), z_bits(z) {}

    static PauliString identity(int n) { return PauliString(n, 0, 0); }
    static PauliString from_index(int n, uint64_t index);
    static PauliString parse(const std::string& symbols);

    bool is_identity() const { return x_bits == 0 && z_bits == 0; }
    int weight() const { return __builtin_popcount(x_bits | z_bits); }

    /// Per-qubit digit in {0:I, 1:X, 2:Y, 3:Z}.
    int digit(int qubit) const {
        const bool x = (x_bits >> qubit) & 1u;
        const bool z = (z_bits >> qubit) & 1u;
        return x ? (z ? 2 : 1) : (z ? 3 : 0);
    }
    void set_digit(int qubit, int d);

    uint64_t index() const;
    std::string str() const;

    /// Restriction to an ordered list of qubits, as a base-4 index over that
    /// sub-register (first listed qubit most significant).
    uint64_t restricted_index(const std::vector<int>& qubits) const;

    bool operator==(const PauliString& o) const {
        return n == o.n && x_bits == o.x_bits && z_bits == o.z_bits;
    }
};

/// 0 if a and b commute, 1 if they anticommute:
/// parity of (a.x & b.z) xor (a.z & b.x).
int symplectic_product(const PauliString& a, const PauliString& b);

/// Pauli with a tracked power of i: value = i^phase * X^x Z^z (qubit-ordered
/// raw form). Hermitian elements always reduce to a +-1 sign.
struct SignedPauli {
    PauliString p;
    int phase = 0;  // power of i, mod 4, in raw X^x Z^z form

    static SignedPauli from_canonical(const PauliString& ps, int sign);
    SignedPauli multiplied_by(const SignedPauli& rhs) const;
    /// Extract the +-1 sign of the canonical (Hermitian) form. Throws if the
    /// accumulated phase is imaginary.
    int canonical_sign() const;
};

/// Clifford element as the images of the X_i and Z_i generators, each a
/// canonical Pauli string with a sign. Conjugation preserves the symplectic
/// form; `check_valid` asserts the commutation relations.
class CliffordTableau {
  public:
    explicit CliffordTableau(int n);

    static CliffordTableau identity(int n);
    static CliffordTableau sqrt_x(int n, int qubit);  // Rx(+pi/2): Z -> -Y, Y -> Z
    static CliffordTableau s_gate(int n, int qubit);  // S: X -> Y, Y -> -X
    static CliffordTableau cz(int n, int q0, int q1);

    int num_qubits() const { return n_; }

    const PauliString& image_x(int q) const { return img_[q].p; }
    const PauliString& image_z(int q) const { return img_[n_ + q].p; }
    int sign_x(int q) const;
    int sign_z(int q) const;
    void set_image_x(int q, const PauliString& p, int sign);
    void set_image_z(int q, const PauliString& p, int sign);

    /// G P G(dagger) with its sign.
    std::pair<PauliString, int> conjugate(const PauliString& p) const;
    SignedPauli conjugate_signed(const SignedPauli& sp) const;

    /// Tableau of (second after first), i.e. the circuit that applies `first`
    /// then `second`.
    static CliffordTableau compose(const CliffordTableau& first,
                                   const CliffordTableau& second);
    CliffordTableau inverse() const;

    bool check_valid() const;
    bool operator==(const CliffordTableau& o) const;

    /// Stable key for hashing (masks and signs of all generator images).
    uint64_t key() const;

  private:
    int n_;
    std::vector<SignedPauli> img_;  // X_0..X_{n-1}, Z_0..Z_{n-1}
};

/// Per-step conjugation trajectory of p through an ordered gate list:
/// entry 0 is (p, +1); entry k is the image after the first k gates.
std::vector<std::pair<PauliString, int>> conjugate_through_circuit(
    const std::vector<CliffordTableau>& gates, const PauliString& p);

}  // namespace acesim
