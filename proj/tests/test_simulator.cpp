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

#include "acesim/simulator.hpp"
#include "acesim/design.hpp"
#include "oracles.hpp"

using namespace acesim;

namespace {

Circuit random_gateset_circuit(Rng& rng, int gates) {
    Circuit c(2);
    for (int i = 0; i < gates; ++i) {
        switch (rng.below(3)) {
            case 0: c.append(GateOp::s(static_cast<int>(rng.below(2)))); break;
            case 1: c.append(GateOp::sqrt_x(static_cast<int>(rng.below(2)))); break;
            default: c.append(GateOp::cz(0, 1)); break;
        }
    }
    return c;
}

double tvd(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += 0.5 * std::abs(a[i] - b[i]);
    return s;
}

}  // namespace

TEST_CASE("noiseless exact simulation matches the statevector oracle") {
    Rng rng(21);
    const NoiseModel noiseless = NoiseModel::noiseless();
    for (int trial = 0; trial < 20; ++trial) {
        const Circuit c = random_gateset_circuit(rng, 8);
        const PauliString input = PauliString::from_index(2, 1 + rng.below(15));
        const DesignRow row = compute_row(c, input);
        const auto pb = prep_and_basis_circuits(input, row.output_pauli);
        RunOptions opts;
        opts.prep_ops = pb.prep_ops;
        opts.basis_ops = pb.basis_ops;
        const auto dist = run_exact(c, noiseless, opts);
        const auto oracle = oracles::statevector_probs(c, pb.prep_ops, pb.basis_ops);
        for (size_t j = 0; j < 4; ++j) CHECK(dist.probs[j] == doctest::Approx(oracle[j]).epsilon(1e-10));
    }
}

TEST_CASE("injected coherent rotations match the statevector oracle") {
    Rng rng(22);
    const NoiseModel noiseless = NoiseModel::noiseless();
    for (int trial = 0; trial < 10; ++trial) {
        Circuit c = random_gateset_circuit(rng, 6);
        if (c.count_kind(GateKind::CZ) == 0) c.append(GateOp::cz(0, 1));
        c = inject_coherent_error(c, 0.37, 1);
        RunOptions opts;
        opts.prep_ops = {GateOp::sqrt_x(0), GateOp::sqrt_x(1)};
        const auto dist = run_exact(c, noiseless, opts);
        const auto oracle = oracles::statevector_probs(c, opts.prep_ops, {});
        for (size_t j = 0; j < 4; ++j) CHECK(dist.probs[j] == doctest::Approx(oracle[j]).epsilon(1e-10));
    }
}

TEST_CASE("spam bit-flip moves population") {
    NoiseModel nm = NoiseModel::noiseless();
    const double q = 0.07;
    nm.spam0 = PauliChannel(1, {1.0 - q, q, 0.0, 0.0});
    const Circuit empty(2);
    const auto dist = run_exact(empty, nm);
    // qubit 0 is the most significant outcome bit
    CHECK(dist.p(0b10) == doctest::Approx(q).epsilon(1e-12));
    CHECK(dist.p(0) == doctest::Approx(1.0 - q).epsilon(1e-12));
}

TEST_CASE("probability is conserved through noisy circuits") {
    Rng rng(23);
    const NoiseModel nm = NoiseModel::appendix_table();
    for (int trial = 0; trial < 10; ++trial) {
        const Circuit c = random_gateset_circuit(rng, 10);
        const auto dist = run_exact(c, nm);
        double sum = 0.0;
        for (double p : dist.probs) {
            CHECK(p >= -1e-12);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("coherent and twirled survival curves") {
    // Odd chain of CZs on (|1> tensor |-i>) with an injected rotation on the
    // target: untwirled follows cos(N theta), twirled follows cos^N(theta).
    const NoiseModel noiseless = NoiseModel::noiseless();
    const int n_cz = 3;
    for (double theta : {0.0, 0.4, 1.1, 2.2}) {
        Circuit c(2);
        for (int i = 0; i < n_cz; ++i) c.append(GateOp::cz(0, 1));
        c = inject_coherent_error(c, theta, 1);
        RunOptions opts;
        opts.prep_ops = {GateOp::sqrt_x(0), GateOp::sqrt_x(0), GateOp::sqrt_x(1)};
        opts.basis_ops = {GateOp::sqrt_x(1)};
        const auto coherent = run_exact(c, noiseless, opts);
        const double p0_coherent = coherent.p(0b10);  // q0 stays |1>
        CHECK(p0_coherent ==
              doctest::Approx(0.5 * (1.0 + std::cos(n_cz * theta))).epsilon(1e-10));

        RunOptions twirled = opts;
        twirled.gate_twirl = true;
        const auto tw = run_exact(c, noiseless, twirled);
        const double p0_tw = tw.p(0b10);
        CHECK(p0_tw ==
              doctest::Approx(0.5 * (1.0 + std::pow(std::cos(theta), n_cz))).epsilon(1e-10));
    }
}

TEST_CASE("analytic twirl of an injected rotation equals a planted p_IZ") {
    const double theta = 0.42;
    const double s2 = std::sin(theta / 2.0) * std::sin(theta / 2.0);
    Circuit c(2);
    c.append(GateOp::sqrt_x(0));
    c.append(GateOp::cz(0, 1));
    c.append(GateOp::s(1));
    c.append(GateOp::cz(0, 1));
    const Circuit injected = inject_coherent_error(c, theta, 1);

    NoiseModel planted = NoiseModel::noiseless();
    planted.cz = PauliChannel(2, [&] {
        std::vector<double> p(16, 0.0);
        p[0] = 1.0 - s2;
        p[PauliString::parse("IZ").index()] = s2;
        return p;
    }());

    RunOptions opts;
    opts.prep_ops = {GateOp::sqrt_x(1)};
    opts.gate_twirl = true;
    const auto a = run_exact(injected, NoiseModel::noiseless(), opts);
    const auto b = run_exact(c, planted, opts);
    for (size_t j = 0; j < 4; ++j) CHECK(a.probs[j] == doctest::Approx(b.probs[j]).epsilon(1e-12));
}

TEST_CASE("monte-carlo twirl converges to the analytic twirl") {
    NoiseModel nm = NoiseModel::appendix_table();
    Circuit c(2);
    c.append(GateOp::s(0));
    c.append(GateOp::cz(0, 1));
    c.append(GateOp::sqrt_x(1));
    c.append(GateOp::cz(0, 1));
    c = inject_coherent_error(c, 0.3, 1);
    c.append(GateOp::measure(0));
    c.append(GateOp::measure(1));
    RunOptions opts;
    opts.prep_ops = {GateOp::sqrt_x(0)};
    opts.gate_twirl = true;
    opts.measurement_twirl = true;
    const auto exact = run_exact(c, nm, opts);
    const uint64_t shots = 10000;
    const auto mc = run_shots(c, nm, shots, 1234, opts);
    CHECK(tvd(exact.probs, mc.probs) < 5.0 / std::sqrt(static_cast<double>(shots)));
}

TEST_CASE("run_shots is deterministic and thread-count independent") {
    NoiseModel nm = NoiseModel::appendix_table();
    Circuit c(2);
    c.append(GateOp::cz(0, 1));
    c.append(GateOp::measure(0));
    c.append(GateOp::measure(1));
    RunOptions opts;
    opts.gate_twirl = true;
    opts.measurement_twirl = true;
    opts.threads = 1;
    const auto a = run_shots(c, nm, 2000, 99, opts);
    opts.threads = 4;
    const auto b = run_shots(c, nm, 2000, 99, opts);
    CHECK(a.counts == b.counts);
}

TEST_CASE("confusion application") {
    OutcomeDistribution d;
    d.n = 1;
    d.probs = {1.0, 0.0};
    ConfusionMatrix cm(1);
    cm.at(0, 0) = 0.98;
    cm.at(0, 1) = 0.02;
    cm.at(1, 0) = 0.05;
    cm.at(1, 1) = 0.95;
    const auto noisy = apply_confusion(d, std::vector<ConfusionMatrix>{cm});
    CHECK(noisy.probs[0] == doctest::Approx(0.98));
    CHECK(noisy.probs[1] == doctest::Approx(0.02));

    // Identity leaves distributions unchanged.
    const auto same = apply_confusion(d, std::vector<ConfusionMatrix>{ConfusionMatrix::identity(1)});
    CHECK(same.probs[0] == doctest::Approx(1.0));
}

TEST_CASE("symmetric confusion commutes with bit flips") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        ConfusionMatrix cm(1);
        const double e = 0.3 * rng.unit();
        cm.at(0, 0) = 1.0 - e;
        cm.at(0, 1) = e;
        cm.at(1, 0) = e;
        cm.at(1, 1) = 1.0 - e;
        OutcomeDistribution d;
        d.n = 1;
        const double p = rng.unit();
        d.probs = {p, 1.0 - p};
        const auto a = apply_confusion(d, std::vector<ConfusionMatrix>{cm});
        OutcomeDistribution flipped;
        flipped.n = 1;
        flipped.probs = {d.probs[1], d.probs[0]};
        const auto b = apply_confusion(flipped, std::vector<ConfusionMatrix>{cm});
        CHECK(a.probs[0] == doctest::Approx(b.probs[1]).epsilon(1e-12));
    }
}

TEST_CASE("mem mitigation inverts confusion exactly") {
    Rng rng(33);
    NoiseModel nm = NoiseModel::noiseless();
    auto [r0, c0] = damping_measurement_model(0.08, 0.9);
    auto [r1, c1] = damping_measurement_model(0.12, 1.0);
    (void)c0;
    (void)c1;
    nm.meas_error[0] = r0;
    nm.meas_error[1] = r1;
    const ConfusionMatrix joint = exact_confusion(nm, false);

    OutcomeDistribution d;
    d.n = 2;
    d.probs = {0.4, 0.3, 0.2, 0.1};
    const auto noisy = apply_confusion(d, joint);
    const auto back = mem_mitigate(noisy, joint);
    for (size_t j = 0; j < 4; ++j) CHECK(back.probs[j] == doctest::Approx(d.probs[j]).epsilon(1e-9));

    // Identity confusion: no change.
    const auto same = mem_mitigate(d, ConfusionMatrix::identity(2));
    for (size_t j = 0; j < 4; ++j) CHECK(same.probs[j] == doctest::Approx(d.probs[j]));

    // Singular confusion is rejected.
    ConfusionMatrix sing(1);
    sing.at(0, 0) = 0.5;
    sing.at(0, 1) = 0.5;
    sing.at(1, 0) = 0.5;
    sing.at(1, 1) = 0.5;
    OutcomeDistribution d1;
    d1.n = 1;
    d1.probs = {0.5, 0.5};
    CHECK_THROWS(mem_mitigate(d1, sing));
}

TEST_CASE("mitigated finite-shot estimates are unbiased") {
    NoiseModel nm = NoiseModel::noiseless();
    auto [r0, cc] = damping_measurement_model(0.1, 1.0);
    (void)cc;
    nm.meas_error[0] = r0;
    nm.meas_error[1] = r0;
    const ConfusionMatrix joint = exact_confusion(nm, false);

    Circuit c(2);
    c.append(GateOp::sqrt_x(0));
    c.append(GateOp::measure(0));
    c.append(GateOp::measure(1));
    const auto truth_noisy = run_exact(c, NoiseModel::noiseless());  // no meas error
    const int reps = 1000;
    const uint64_t shots = 200;
    std::vector<double> means(4, 0.0);
    for (int rep = 0; rep < reps; ++rep) {
        const auto sampled = run_shots(c, nm, shots, 1000 + static_cast<uint64_t>(rep));
        const auto mitigated = mem_mitigate(sampled, joint);
        for (size_t j = 0; j < 4; ++j) means[j] += mitigated.probs[j];
    }
    for (size_t j = 0; j < 4; ++j) {
        means[j] /= reps;
        // 3 sigma of the mean at p(1-p)/ (shots*reps) scale, inflated by MEM.
        const double sigma =
            3.0 * std::sqrt(0.25 / static_cast<double>(shots * static_cast<uint64_t>(reps))) * 2.0;
        CHECK(std::abs(means[j] - truth_noisy.probs[j]) < sigma + 1e-3);
    }
}

TEST_CASE("estimated confusion matrices") {
    // Noiseless: exact identity.
    const ConfusionMatrix ident = estimate_confusion(NoiseModel::noiseless(), 2000, 5, false);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(ident.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

    // Damping on both qubits reproduces the analytic confusion at 1e4 shots.
    NoiseModel nm = NoiseModel::noiseless();
    auto [r, c] = damping_measurement_model(0.1, 1.0);
    (void)c;
    nm.meas_error[0] = r;
    nm.meas_error[1] = r;
    const uint64_t shots = 10000;
    const ConfusionMatrix est = estimate_confusion(nm, shots, 6, false);
    const ConfusionMatrix truth = exact_confusion(nm, false);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double p = truth.at(i, j);
            const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-9) / static_cast<double>(shots));
            CHECK(std::abs(est.at(i, j) - p) < 5.0 * sigma + 1e-9);
        }
    }

    // Measurement twirling symmetrizes the estimate.
    const ConfusionMatrix tw = estimate_confusion(nm, shots, 7, true);
    const ConfusionMatrix tw_truth = exact_confusion(nm, true);
    CHECK(tw_truth.at(0, 1) == doctest::Approx(tw_truth.at(1, 0)).epsilon(1e-12));
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += tw.at(i, j);
        CHECK(row == doctest::Approx(1.0));
    }
    const double asym = std::abs(tw.at(0, 1) - tw.at(1, 0));
    CHECK(asym < 4.0 * std::sqrt(2.0 * 0.05 * 0.95 / static_cast<double>(shots)));
}
