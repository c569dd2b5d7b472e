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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "acesim/pauli.hpp"
#include "acesim/circuit.hpp"
#include "oracles.hpp"

using namespace acesim;

namespace {

Circuit worked_example_circuit() {
    // Alternating 2-qubit circuit: [S,S] CZ [sqrt_x,sqrt_x] CZ [sqrt_x,S] CZ
    // [S,S] CZ.
    Circuit c(2);
    c.append(GateOp::s(0));
    c.append(GateOp::s(1));
    c.append(GateOp::cz(0, 1));
    c.append(GateOp::sqrt_x(0));
    c.append(GateOp::sqrt_x(1));
    c.append(GateOp::cz(0, 1));
    c.append(GateOp::sqrt_x(0));
    c.append(GateOp::s(1));
    c.append(GateOp::cz(0, 1));
    c.append(GateOp::s(0));
    c.append(GateOp::s(1));
    c.append(GateOp::cz(0, 1));
    return c;
}

}  // namespace

TEST_CASE("index round trip and rendering") {
    for (uint64_t a = 0; a < 16; ++a) {
        const PauliString p = PauliString::from_index(2, a);
        CHECK(p.index() == a);
        CHECK(PauliString::parse(p.str()) == p);
    }
    CHECK(PauliString::parse("IY").index() == 2);
    CHECK(PauliString::parse("XZ").str() == "XZ");
    CHECK(PauliString::parse("IZ").weight() == 1);
    CHECK(PauliString::identity(2).is_identity());
}

TEST_CASE("symplectic product basics") {
    const auto X = PauliString::parse("X");
    const auto Z = PauliString::parse("Z");
    CHECK(symplectic_product(X, X) == 0);
    CHECK(symplectic_product(X, Z) == 1);
    // (XY, YX) commute: pinned by the dense commutator oracle below.
    CHECK(symplectic_product(PauliString::parse("XY"), PauliString::parse("YX")) == 0);
    CHECK_THROWS(symplectic_product(X, PauliString::parse("XY")));
}

TEST_CASE("symplectic product matches dense commutators on all 2q pairs") {
    for (uint64_t a = 0; a < 16; ++a) {
        for (uint64_t b = 0; b < 16; ++b) {
            const auto pa = PauliString::from_index(2, a);
            const auto pb = PauliString::from_index(2, b);
            const auto ma = oracles::pauli_matrix(pa);
            const auto mb = oracles::pauli_matrix(pb);
            const bool commute = (ma * mb - mb * ma).norm() < 1e-12;
            CHECK(symplectic_product(pa, pb) == (commute ? 0 : 1));
            CHECK(symplectic_product(pa, pb) == symplectic_product(pb, pa));
        }
    }
}

TEST_CASE("gate tableaus agree with dense conjugation on all 16 Paulis") {
    const std::vector<GateOp> gates = {GateOp::sqrt_x(0), GateOp::sqrt_x(1), GateOp::s(0),
                                       GateOp::s(1), GateOp::cz(0, 1)};
    for (const auto& g : gates) {
        const CliffordTableau t = tableau_of_op(g, 2);
        CHECK(t.check_valid());
        const auto u = oracles::op_unitary(g, 2);
        for (uint64_t a = 0; a < 16; ++a) {
            const auto p = PauliString::from_index(2, a);
            const auto [tp, ts] = t.conjugate(p);
            const auto [dp, ds] = oracles::dense_conjugate(u, p);
            CHECK(tp == dp);
            CHECK(ts == ds);
        }
    }
}

TEST_CASE("CZ conjugation fixed points and images") {
    const CliffordTableau cz = CliffordTableau::cz(2, 0, 1);
    CHECK(cz.conjugate(PauliString::parse("II")) ==
          std::pair<PauliString, int>{PauliString::parse("II"), 1});
    CHECK(cz.conjugate(PauliString::parse("XI")) ==
          std::pair<PauliString, int>{PauliString::parse("XZ"), 1});
}

TEST_CASE("conjugation is a bijection for every gate") {
    for (const auto& g : {GateOp::sqrt_x(0), GateOp::s(1), GateOp::cz(0, 1)}) {
        const CliffordTableau t = tableau_of_op(g, 2);
        std::set<uint64_t> images;
        for (uint64_t a = 0; a < 16; ++a) {
            images.insert(t.conjugate(PauliString::from_index(2, a)).first.index());
        }
        CHECK(images.size() == 16);
    }
}

TEST_CASE("conjugate then inverse returns the original with sign +1") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Circuit c(2);
        for (int i = 0; i < 6; ++i) {
            switch (rng.below(3)) {
                case 0: c.append(GateOp::s(static_cast<int>(rng.below(2)))); break;
                case 1: c.append(GateOp::sqrt_x(static_cast<int>(rng.below(2)))); break;
                default: c.append(GateOp::cz(0, 1)); break;
            }
        }
        const CliffordTableau t = tableau_of_circuit(c);
        const CliffordTableau ti = t.inverse();
        const PauliString p = PauliString::from_index(2, rng.below(16));
        const auto [img, s1] = t.conjugate(p);
        const auto [back, s2] = ti.conjugate(img);
        CHECK(back == p);
        CHECK(s1 * s2 == 1);
    }
}

TEST_CASE("worked-example circuit maps IY to YY") {
    const Circuit c = worked_example_circuit();
    const CliffordTableau t = tableau_of_circuit(c);
    const auto [out, sign] = t.conjugate(PauliString::parse("IY"));
    CHECK(out == PauliString::parse("YY"));
    CHECK(sign == 1);

    // Dense end-to-end check of the same mapping.
    const auto u = oracles::circuit_unitary(c);
    const auto [dp, ds] = oracles::dense_conjugate(u, PauliString::parse("IY"));
    CHECK(dp == PauliString::parse("YY"));
    CHECK(ds == sign);
}

TEST_CASE("trajectory through a circuit") {
    const auto empty = conjugate_through_circuit({}, PauliString::parse("XZ"));
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].first == PauliString::parse("XZ"));
    CHECK(empty[0].second == 1);

    // Single CZ: XI -> XZ (dense oracle pins the sign convention).
    const auto traj =
        conjugate_through_circuit({CliffordTableau::cz(2, 0, 1)}, PauliString::parse("XI"));
    REQUIRE(traj.size() == 2);
    CHECK(traj[0].first == PauliString::parse("XI"));
    CHECK(traj[1].first == PauliString::parse("XZ"));
    CHECK(traj[1].second == 1);

    const Circuit c = worked_example_circuit();
    std::vector<CliffordTableau> gates;
    for (const auto& op : c.ops) gates.push_back(tableau_of_op(op, 2));
    const auto full = conjugate_through_circuit(gates, PauliString::parse("IY"));
    CHECK(full.size() == c.ops.size() + 1);
    CHECK(full.back().first == PauliString::parse("YY"));
}

TEST_CASE("tableau conjugation equals dense conjugation for random circuits") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        Circuit c(2);
        for (int i = 0; i < 8; ++i) {
            switch (rng.below(3)) {
                case 0: c.append(GateOp::s(static_cast<int>(rng.below(2)))); break;
                case 1: c.append(GateOp::sqrt_x(static_cast<int>(rng.below(2)))); break;
                default: c.append(GateOp::cz(0, 1)); break;
            }
        }
        const CliffordTableau t = tableau_of_circuit(c);
        const auto u = oracles::circuit_unitary(c);
        for (uint64_t a = 0; a < 16; ++a) {
            const auto p = PauliString::from_index(2, a);
            const auto [tp, ts] = t.conjugate(p);
            const auto [dp, ds] = oracles::dense_conjugate(u, p);
            CHECK(tp == dp);
            CHECK(ts == ds);
        }
    }
}
