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

#include <cmath>

#include "acesim/channel.hpp"
#include "acesim/noise_model.hpp"
#include "oracles.hpp"

using namespace acesim;

TEST_CASE("hadamard transform of the identity channel") {
    const auto lam = hadamard_transform({1.0, 0.0, 0.0, 0.0});
    for (double v : lam) CHECK(v == doctest::Approx(1.0));
    CHECK_THROWS(hadamard_transform({1.0, 0.0, 0.0}));  // not a power of 4
}

TEST_CASE("hadamard equals the direct symplectic sum") {
    Rng rng(3);
    for (int n = 1; n <= 3; ++n) {
        const size_t len = 1u << (2 * n);
        std::vector<double> p(len);
        for (double& v : p) v = rng.unit();
        const auto lam = hadamard_transform(p);
        for (size_t a = 0; a < len; ++a) {
            double direct = 0.0;
            for (size_t b = 0; b < len; ++b) {
                const int sp = symplectic_product(PauliString::from_index(n, a),
                                                  PauliString::from_index(n, b));
                direct += (sp ? -1.0 : 1.0) * p[b];
            }
            CHECK(lam[a] == doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("two-qubit uniform depolarizing eigenvalues") {
    // Direct-summation oracle: every non-identity row sees 8 commuting and 8
    // anticommuting Paulis, so lambda = 1 - 16 eps.
    const double eps = 1e-3;
    const PauliChannel ch = PauliChannel::depolarizing(2, eps);
    const auto lam = ch.eigenvalues();
    CHECK(lam[0] == doctest::Approx(1.0));
    for (size_t a = 1; a < 16; ++a) {
        CHECK(lam[a] == doctest::Approx(1.0 - 16.0 * eps).epsilon(1e-12));
    }
}

TEST_CASE("published sqrt_x row eigenvalue") {
    // lambda_X = p_I + p_X - p_Y - p_Z on the raw printed values.
    const std::vector<double> p = {0.998, 1.28e-5, 1.65e-3, 1.40e-4};
    const auto lam = hadamard_transform(p);
    CHECK(lam[1] == doctest::Approx(0.998 + 1.28e-5 - 1.65e-3 - 1.40e-4).epsilon(1e-14));
    CHECK(lam[1] == doctest::Approx(0.9962228).epsilon(1e-9));
}

TEST_CASE("hadamard round trip is exact to 1e-12") {
    Rng rng(11);
    for (int n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto ch = oracles::random_channel(n, rng);
            const auto back = inverse_hadamard(hadamard_transform(ch.probs));
            for (size_t i = 0; i < back.size(); ++i) {
                CHECK(std::abs(back[i] - ch.probs[i]) < 1e-12);
            }
        }
    }
}

TEST_CASE("ptm of the identity unitary") {
    const Ptm r = ptm_of_unitary(Eigen::MatrixXcd::Identity(4, 4));
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) CHECK(r.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("ptm rejects non-unitary input") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
    m(0, 0) = 2.0;
    CHECK_THROWS(ptm_of_unitary(m));
}

TEST_CASE("ptm of rz has the cosine block") {
    const double theta = 0.3;
    const Ptm r = ptm_of_unitary(unitary_rz(theta));
    CHECK(r.at(0, 0) == doctest::Approx(1.0));
    CHECK(r.at(3, 3) == doctest::Approx(1.0));
    CHECK(r.at(1, 1) == doctest::Approx(std::cos(theta)));
    CHECK(r.at(2, 2) == doctest::Approx(std::cos(theta)));
    CHECK(r.at(2, 1) == doctest::Approx(std::sin(theta)));
    CHECK(r.at(1, 2) == doctest::Approx(-std::sin(theta)));
}

TEST_CASE("ptm of cz is the signed permutation from tableau conjugation") {
    const Ptm r = ptm_of_unitary(unitary_cz());
    const CliffordTableau t = CliffordTableau::cz(2, 0, 1);
    for (uint64_t b = 0; b < 16; ++b) {
        const auto [img, sign] = t.conjugate(PauliString::from_index(2, b));
        for (uint64_t a = 0; a < 16; ++a) {
            const double want = (a == img.index()) ? static_cast<double>(sign) : 0.0;
            CHECK(r.at(static_cast<int>(a), static_cast<int>(b)) == doctest::Approx(want));
        }
    }
}

TEST_CASE("gate-set unitary PTMs agree with tableau conjugation everywhere") {
    for (const auto& g : {GateOp::sqrt_x(0), GateOp::s(0)}) {
        const Ptm r = ptm_of_unitary(oracles::op_unitary(g, 1));
        const CliffordTableau t = tableau_of_op(g, 1);
        for (uint64_t b = 0; b < 4; ++b) {
            const auto [img, sign] = t.conjugate(PauliString::from_index(1, b));
            for (uint64_t a = 0; a < 4; ++a) {
                const double want = (a == img.index()) ? static_cast<double>(sign) : 0.0;
                CHECK(r.at(static_cast<int>(a), static_cast<int>(b)) == doctest::Approx(want));
            }
        }
    }
}

TEST_CASE("twirl is idempotent on Pauli channels") {
    Rng rng(17);
    const auto ch = oracles::random_channel(2, rng);
    const PauliChannel tw = twirl_ptm(Ptm::of_pauli_channel(ch));
    for (size_t i = 0; i < 16; ++i) CHECK(tw.probs[i] == doctest::Approx(ch.probs[i]).epsilon(1e-12));
}

TEST_CASE("twirled rz is a z-flip channel") {
    const double theta = 0.4;
    const PauliChannel tw = twirl_ptm(ptm_of_unitary(unitary_rz(theta)));
    const double pz = std::sin(theta / 2.0) * std::sin(theta / 2.0);
    CHECK(tw.probs[0] == doctest::Approx(1.0 - pz).epsilon(1e-12));
    CHECK(tw.probs[1] == doctest::Approx(0.0));
    CHECK(tw.probs[2] == doctest::Approx(0.0));
    CHECK(tw.probs[3] == doctest::Approx(pz).epsilon(1e-10));

    // Injection angle used downstream: 0.06 * 2pi -> p_Z ~= 0.03511.
    const double dt = 0.06 * 2.0 * M_PI;
    const PauliChannel inj = twirl_ptm(ptm_of_unitary(unitary_rz(dt)));
    CHECK(inj.probs[3] == doctest::Approx(0.0351117569).epsilon(1e-7));
}

TEST_CASE("twirl of mixed-unitary CPTP maps yields valid channels") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        // Random mixed-unitary map on one qubit.
        Ptm mix(1);
        double wsum = 0.0;
        std::vector<double> w(3);
        for (double& x : w) {
            x = rng.unit() + 0.1;
            wsum += x;
        }
        for (int i = 0; i < 3; ++i) {
            Eigen::MatrixXcd g(2, 2);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    g(r, c) = std::complex<double>(rng.unit() - 0.5, rng.unit() - 0.5);
            const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
            Eigen::MatrixXcd u = qr.householderQ();
            const Ptm rp = ptm_of_unitary(u);
            for (size_t k = 0; k < mix.m.size(); ++k) mix.m[k] += (w[static_cast<size_t>(i)] / wsum) * rp.m[k];
        }
        PauliChannel tw = twirl_ptm(mix);
        double sum = 0.0;
        for (double v : tw.probs) {
            CHECK(v >= -1e-9);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("average gate fidelity") {
    CHECK(average_gate_fidelity(PauliChannel::identity(1)) == doctest::Approx(1.0));
    CHECK(average_gate_fidelity(PauliChannel(1, {0.997, 1e-3, 1e-3, 1e-3})) ==
          doctest::Approx((2.0 * 0.997 + 1.0) / 3.0).epsilon(1e-12));
    // Raw published CZ identity rate.
    PauliChannel cz = PauliChannel::identity(2);
    cz.probs[0] = 0.974;
    cz.probs[15] = 0.026;
    CHECK(average_gate_fidelity(cz) == doctest::Approx(0.9792).epsilon(1e-12));
}

TEST_CASE("damping measurement model") {
    {
        const auto [r, c] = damping_measurement_model(0.0, 0.5);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(r.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
        CHECK(c.at(0, 0) == doctest::Approx(1.0));
        CHECK(c.at(1, 1) == doctest::Approx(1.0));
    }
    {
        const auto [r, c] = damping_measurement_model(0.1, 1.0);
        CHECK(c.at(0, 0) == doctest::Approx(1.0));
        CHECK(c.at(0, 1) == doctest::Approx(0.0));
        CHECK(c.at(1, 0) == doctest::Approx(0.1));
        CHECK(c.at(1, 1) == doctest::Approx(0.9));
        CHECK(confusion_of_ptm(r).at(1, 0) == doctest::Approx(0.1));
        // Twirling symmetrizes to the average of the asymmetric entries.
        const ConfusionMatrix tw = symmetrize_confusion_via_twirl(r);
        CHECK(tw.at(0, 1) == doctest::Approx(0.05).epsilon(1e-12));
        CHECK(tw.at(1, 0) == doctest::Approx(0.05).epsilon(1e-12));
    }
    CHECK_THROWS(damping_measurement_model(1.5, 0.0));
}

TEST_CASE("identity ptm symmetrizes to the identity confusion") {
    const ConfusionMatrix c = symmetrize_confusion_via_twirl(Ptm::identity(1));
    CHECK(c.at(0, 0) == doctest::Approx(1.0));
    CHECK(c.at(0, 1) == doctest::Approx(0.0));
    CHECK(c.at(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("pauli measurement channels already have symmetric confusions") {
    Rng rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        const auto ch = oracles::random_channel(1, rng, 5.0);
        const Ptm r = Ptm::of_pauli_channel(ch);
        const ConfusionMatrix c = confusion_of_ptm(r);
        CHECK(c.at(0, 1) == doctest::Approx(c.at(1, 0)).epsilon(1e-12));
        // Twirling cannot change an already-Pauli channel's confusion.
        const ConfusionMatrix tw = symmetrize_confusion_via_twirl(r);
        CHECK(tw.at(0, 1) == doctest::Approx(c.at(0, 1)).epsilon(1e-12));
    }
}

TEST_CASE("appendix table ingestion keeps printed identity rates") {
    std::vector<std::string> warnings;
    const NoiseModel nm = NoiseModel::appendix_table(&warnings);
    CHECK(warnings.size() == 5);  // every row rescaled
    CHECK(nm.cz.probs[0] == doctest::Approx(0.974).epsilon(1e-15));
    CHECK(nm.sqrt_x0.probs[0] == doctest::Approx(0.998).epsilon(1e-15));
    double sum = 0.0;
    for (double v : nm.cz.probs) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // Relative structure preserved.
    CHECK(nm.cz.probs[static_cast<size_t>(PauliString::parse("ZX").index())] /
              nm.cz.probs[static_cast<size_t>(PauliString::parse("IZ").index())] ==
          doctest::Approx(7.24e-3 / 3.45e-3).epsilon(1e-9));
    CHECK(average_gate_fidelity(nm.cz) == doctest::Approx(0.9792).epsilon(1e-12));
}

TEST_CASE("noise model json round trip") {
    NoiseModel nm = NoiseModel::appendix_table();
    nm.prep_flip = {0.019, 0.024};
    auto [r, c] = damping_measurement_model(0.1, 1.0);
    (void)c;
    nm.meas_error[0] = r;
    const NoiseModel back = NoiseModel::from_json(nm.to_json());
    for (int ch = 0; ch < 7; ++ch) {
        const auto& a = nm.channel(static_cast<Channel7>(ch)).probs;
        const auto& b = back.channel(static_cast<Channel7>(ch)).probs;
        for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
    CHECK(back.prep_flip[0] == doctest::Approx(0.019));
    REQUIRE(back.meas_error[0].has_value());
    CHECK(back.meas_error[0]->at(3, 0) == doctest::Approx(r.at(3, 0)));
    CHECK(!back.meas_error[1].has_value());
}

TEST_CASE("channel validation") {
    PauliChannel bad = PauliChannel::identity(1);
    bad.probs[1] = -0.01;
    bad.probs[0] = 1.01;
    CHECK_THROWS(bad.validate());
    PauliChannel nosum = PauliChannel::identity(1);
    nosum.probs[0] = 0.9;
    CHECK_THROWS(nosum.validate());
}
