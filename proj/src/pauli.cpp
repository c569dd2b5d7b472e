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

#include "acesim/pauli.hpp"

#include <array>
#include <stdexcept>

namespace acesim {

namespace {

void require_same_n(int a, int b) {
    if (a != b) throw std::invalid_argument("Pauli dimension mismatch");
}

int popcount(uint32_t v) { return __builtin_popcount(v); }

}  // namespace

PauliString PauliString::from_index(int n, uint64_t index) {
    PauliString p(n, 0, 0);
    for (int q = n - 1; q >= 0; --q) {
        p.set_digit(q, static_cast<int>(index & 3));
        index >>= 2;
    }
    if (index != 0) throw std::invalid_argument("Pauli index out of range");
    return p;
}

PauliString PauliString::parse(const std::string& symbols) {
    PauliString p(static_cast<int>(symbols.size()), 0, 0);
    for (size_t q = 0; q < symbols.size(); ++q) {
        switch (symbols[q]) {
            case 'I': break;
            case 'X': p.set_digit(static_cast<int>(q), 1); break;
            case 'Y': p.set_digit(static_cast<int>(q), 2); break;
            case 'Z': p.set_digit(static_cast<int>(q), 3); break;
            default: throw std::invalid_argument("bad Pauli symbol in \"" + symbols + "\"");
        }
    }
    return p;
}

void PauliString::set_digit(int qubit, int d) {
    const uint32_t bit = 1u << qubit;
    x_bits &= ~bit;
    z_bits &= ~bit;
    if (d == 1 || d == 2) x_bits |= bit;
    if (d == 2 || d == 3) z_bits |= bit;
}

uint64_t PauliString::index() const {
    uint64_t idx = 0;
    for (int q = 0; q < n; ++q) idx = idx * 4 + static_cast<uint64_t>(digit(q));
    return idx;
}

std::string PauliString::str() const {
    static const char sym[4] = {'I', 'X', 'Y', 'Z'};
    std::string s(static_cast<size_t>(n), 'I');
    for (int q = 0; q < n; ++q) s[static_cast<size_t>(q)] = sym[digit(q)];
    return s;
}

uint64_t PauliString::restricted_index(const std::vector<int>& qubits) const {
    uint64_t idx = 0;
    for (int q : qubits) idx = idx * 4 + static_cast<uint64_t>(digit(q));
    return idx;
}

int symplectic_product(const PauliString& a, const PauliString& b) {
    require_same_n(a.n, b.n);
    return (popcount(a.x_bits & b.z_bits) ^ popcount(a.z_bits & b.x_bits)) & 1;
}

// Canonical form carries i^{|x&z|} relative to the raw X^x Z^z product
// (per qubit, Y = i X Z).
SignedPauli SignedPauli::from_canonical(const PauliString& ps, int sign) {
    SignedPauli sp;
    sp.p = ps;
    sp.phase = (popcount(ps.x_bits & ps.z_bits) + (sign < 0 ? 2 : 0)) & 3;
    return sp;
}

SignedPauli SignedPauli::multiplied_by(const SignedPauli& rhs) const {
    // (i^a X^x1 Z^z1)(i^b X^x2 Z^z2) = i^{a+b} (-1)^{|z1&x2|} X^{x1^x2} Z^{z1^z2}
    require_same_n(p.n, rhs.p.n);
    SignedPauli out;
    out.p = PauliString(p.n, p.x_bits ^ rhs.p.x_bits, p.z_bits ^ rhs.p.z_bits);
    out.phase = (phase + rhs.phase + 2 * popcount(p.z_bits & rhs.p.x_bits)) & 3;
    return out;
}

int SignedPauli::canonical_sign() const {
    const int rel = (phase - popcount(p.x_bits & p.z_bits)) & 3;
    if (rel == 0) return 1;
    if (rel == 2) return -1;
    throw std::logic_error("non-Hermitian phase in Pauli product");
}

CliffordTableau::CliffordTableau(int n) : n_(n) {
    img_.reserve(static_cast<size_t>(2 * n));
    for (int q = 0; q < n; ++q) {
        PauliString x(n, 1u << q, 0);
        img_.push_back(SignedPauli::from_canonical(x, 1));
    }
    for (int q = 0; q < n; ++q) {
        PauliString z(n, 0, 1u << q);
        img_.push_back(SignedPauli::from_canonical(z, 1));
    }
}

CliffordTableau CliffordTableau::identity(int n) { return CliffordTableau(n); }

int CliffordTableau::sign_x(int q) const { return img_[static_cast<size_t>(q)].canonical_sign(); }
int CliffordTableau::sign_z(int q) const {
    return img_[static_cast<size_t>(n_ + q)].canonical_sign();
}

void CliffordTableau::set_image_x(int q, const PauliString& p, int sign) {
    img_[static_cast<size_t>(q)] = SignedPauli::from_canonical(p, sign);
}

void CliffordTableau::set_image_z(int q, const PauliString& p, int sign) {
    img_[static_cast<size_t>(n_ + q)] = SignedPauli::from_canonical(p, sign);
}

CliffordTableau CliffordTableau::sqrt_x(int n, int qubit) {
    CliffordTableau t(n);
    PauliString y(n, 0, 0);
    y.set_digit(qubit, 2);
    t.set_image_z(qubit, y, -1);  // Z -> -Y
    return t;
}

CliffordTableau CliffordTableau::s_gate(int n, int qubit) {
    CliffordTableau t(n);
    PauliString y(n, 0, 0);
    y.set_digit(qubit, 2);
    t.set_image_x(qubit, y, 1);  // X -> Y
    return t;
}

CliffordTableau CliffordTableau::cz(int n, int q0, int q1) {
    if (q0 == q1) throw std::invalid_argument("CZ requires two distinct qubits");
    CliffordTableau t(n);
    PauliString xz(n, 0, 0), zx(n, 0, 0);
    xz.set_digit(q0, 1);
    xz.set_digit(q1, 3);
    zx.set_digit(q0, 3);
    zx.set_digit(q1, 1);
    t.set_image_x(q0, xz, 1);  // X0 -> X0 Z1
    t.set_image_x(q1, zx, 1);  // X1 -> Z0 X1
    return t;
}

std::pair<PauliString, int> CliffordTableau::conjugate(const PauliString& p) const {
    const SignedPauli out = conjugate_signed(SignedPauli::from_canonical(p, 1));
    return {out.p, out.canonical_sign()};
}

SignedPauli CliffordTableau::conjugate_signed(const SignedPauli& sp) const {
    require_same_n(sp.p.n, n_);
    // G (i^ph X^x Z^z) G^dag = i^ph prod_q img_x(q)^{x_q} img_z(q)^{z_q}.
    SignedPauli acc;
    acc.p = PauliString(n_, 0, 0);
    acc.phase = sp.phase;
    for (int q = 0; q < n_; ++q) {
        if ((sp.p.x_bits >> q) & 1u) acc = acc.multiplied_by(img_[static_cast<size_t>(q)]);
        if ((sp.p.z_bits >> q) & 1u) acc = acc.multiplied_by(img_[static_cast<size_t>(n_ + q)]);
    }
    return acc;
}

CliffordTableau CliffordTableau::compose(const CliffordTableau& first,
                                         const CliffordTableau& second) {
    require_same_n(first.n_, second.n_);
    CliffordTableau out(first.n_);
    for (size_t i = 0; i < out.img_.size(); ++i) {
        out.img_[i] = second.conjugate_signed(first.img_[i]);
    }
    return out;
}

CliffordTableau CliffordTableau::inverse() const {
    // Invert the symplectic action over GF(2), then fix signs so that
    // inv(image(g)) = +g for every generator.
    const int m = 2 * n_;
    // rows: images of generators as (x|z) bit rows; solve M^T a = e_g.
    std::vector<uint64_t> mat(static_cast<size_t>(m), 0);
    for (int g = 0; g < m; ++g) {
        const PauliString& ip = img_[static_cast<size_t>(g)].p;
        mat[static_cast<size_t>(g)] =
            static_cast<uint64_t>(ip.x_bits) | (static_cast<uint64_t>(ip.z_bits) << n_);
    }
    // Gaussian elimination with an identity tag to build the inverse matrix.
    std::vector<uint64_t> rows = mat;
    std::vector<uint64_t> tag(static_cast<size_t>(m), 0);
    for (int g = 0; g < m; ++g) tag[static_cast<size_t>(g)] = 1ULL << g;
    for (int col = 0, r = 0; col < m && r < m; ++col) {
        int pivot = -1;
        for (int i = r; i < m; ++i) {
            if ((rows[static_cast<size_t>(i)] >> col) & 1ULL) { pivot = i; break; }
        }
        if (pivot < 0) throw std::logic_error("singular tableau");
        std::swap(rows[static_cast<size_t>(pivot)], rows[static_cast<size_t>(r)]);
        std::swap(tag[static_cast<size_t>(pivot)], tag[static_cast<size_t>(r)]);
        for (int i = 0; i < m; ++i) {
            if (i != r && ((rows[static_cast<size_t>(i)] >> col) & 1ULL)) {
                rows[static_cast<size_t>(i)] ^= rows[static_cast<size_t>(r)];
                tag[static_cast<size_t>(i)] ^= tag[static_cast<size_t>(r)];
            }
        }
        ++r;
    }
    // After elimination rows is the identity, so tag[g] lists which images
    // multiply to generator g; that combination is the inverse image of g.
    CliffordTableau inv(n_);
    for (int g = 0; g < m; ++g) {
        uint32_t x = 0, z = 0;
        for (int j = 0; j < m; ++j) {
            if ((tag[static_cast<size_t>(g)] >> j) & 1ULL) {
                x ^= (j < n_) ? (1u << j) : 0u;
                z ^= (j < n_) ? 0u : (1u << (j - n_));
            }
        }
        PauliString pre(n_, x, z);
        auto [post, sign] = conjugate(pre);
        // post must be the generator g itself; flip the stored sign so the
        // round trip is +1.
        if (g < n_) inv.set_image_x(g, pre, sign);
        else inv.set_image_z(g - n_, pre, sign);
    }
    // Verify the composition is the identity.
    CliffordTableau check = compose(*this, inv);
    if (!(check == CliffordTableau::identity(n_)))
        throw std::logic_error("tableau inverse verification failed");
    return inv;
}

bool CliffordTableau::check_valid() const {
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            const int want_xz = (i == j) ? 1 : 0;
            if (symplectic_product(image_x(i), image_z(j)) != want_xz) return false;
            if (symplectic_product(image_x(i), image_x(j)) != 0) return false;
            if (symplectic_product(image_z(i), image_z(j)) != 0) return false;
        }
    }
    return true;
}

bool CliffordTableau::operator==(const CliffordTableau& o) const {
    if (n_ != o.n_) return false;
    for (size_t i = 0; i < img_.size(); ++i) {
        if (!(img_[i].p == o.img_[i].p) || img_[i].phase != o.img_[i].phase) return false;
    }
    return true;
}

uint64_t CliffordTableau::key() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;
    };
    for (const auto& sp : img_) {
        mix(sp.p.x_bits);
        mix(sp.p.z_bits);
        mix(static_cast<uint64_t>(sp.canonical_sign() > 0 ? 1 : 2));
    }
    return h;
}

std::vector<std::pair<PauliString, int>> conjugate_through_circuit(
    const std::vector<CliffordTableau>& gates, const PauliString& p) {
    std::vector<std::pair<PauliString, int>> traj;
    traj.reserve(gates.size() + 1);
    SignedPauli cur = SignedPauli::from_canonical(p, 1);
    traj.emplace_back(cur.p, 1);
    for (const auto& g : gates) {
        cur = g.conjugate_signed(cur);
        traj.emplace_back(cur.p, cur.canonical_sign());
    }
    return traj;
}

}  // namespace acesim
