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

#include "acesim/rb.hpp"

using namespace acesim;

namespace {

// Analytic depolarizing composition oracle: per-Clifford decay averaged over
// the enumerated group, given a uniform per-gate depolarizing eigenvalue.
double expected_alpha(int n, double lambda_sqrt_x, double lambda_s, double lambda_cz,
                      int extra_cz_per_clifford = 0) {
    const auto& group = CliffordGroup::instance(n);
    double acc = 0.0;
    for (size_t i = 0; i < group.size(); ++i) {
        double a = 1.0;
        for (const auto& op : group.compiled(i)) {
            switch (op.kind) {
                case GateKind::SqrtX: a *= lambda_sqrt_x; break;
                case GateKind::S: a *= lambda_s; break;
                case GateKind::CZ: a *= lambda_cz; break;
                default: break;
            }
        }
        for (int e = 0; e < extra_cz_per_clifford; ++e) a *= lambda_cz;
        acc += a;
    }
    return acc / static_cast<double>(group.size());
}

}  // namespace

TEST_CASE("decay fit recovers synthetic parameters") {
    const std::vector<double> depths = {1, 2, 4, 8, 16, 32, 64, 128};
    std::vector<double> survival;
    for (double n : depths) survival.push_back(0.5 * std::pow(0.9971, n) + 0.5);
    const DecayFit fit = fit_decay(depths, survival, 0.5);
    CHECK(fit.alpha == doctest::Approx(0.9971).epsilon(1e-6));
    CHECK(fit.amplitude == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("constant survival above the asymptote means alpha = 1") {
    const std::vector<double> depths = {1, 5, 9, 17};
    const std::vector<double> survival(4, 0.85);
    const DecayFit fit = fit_decay(depths, survival, 0.5);
    CHECK(fit.alpha == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.amplitude == doctest::Approx(0.35).epsilon(1e-6));
}

TEST_CASE("decay fit is scale consistent") {
    const std::vector<double> depths = {1, 3, 7, 15, 31};
    std::vector<double> survival, scaled;
    for (double n : depths) {
        const double dev = 0.48 * std::pow(0.96, n);
        survival.push_back(dev + 0.5);
        scaled.push_back(0.5 * dev + 0.5);
    }
    const DecayFit a = fit_decay(depths, survival, 0.5);
    const DecayFit b = fit_decay(depths, scaled, 0.5);
    CHECK(a.alpha == doctest::Approx(b.alpha).epsilon(1e-7));
    CHECK(b.amplitude == doctest::Approx(0.5 * a.amplitude).epsilon(1e-6));
}

TEST_CASE("degenerate decays are rejected") {
    CHECK_THROWS(fit_decay({1, 2, 4}, {0.5, 0.49, 0.5}, 0.5));
    CHECK_THROWS(fit_decay({1, 2}, {0.9, 0.8}, 0.5));
    CHECK_THROWS(fit_decay({1, 2, 4}, {0.9, 0.8, 1.2}, 0.5));
}

TEST_CASE("single-qubit fidelity formula") {
    CHECK(fidelity_1q(1.0) == doctest::Approx(1.0));
    CHECK(fidelity_1q(0.9971) == doctest::Approx(0.99855).epsilon(1e-12));
    CHECK(fidelity_1q(0.9962) == doctest::Approx(0.9981).epsilon(1e-12));
    CHECK_THROWS(fidelity_1q(0.0));
    CHECK_THROWS(fidelity_1q(1.5));
}

TEST_CASE("interleaved fidelity formula") {
    CHECK(fidelity_irb(0.9, 0.9) == doctest::Approx(1.0));
    CHECK(fidelity_irb(0.926, 0.947) == doctest::Approx(0.983369).epsilon(1e-5));
    CHECK(fidelity_irb(0.675, 0.778) == doctest::Approx(0.900707).epsilon(1e-5));
    CHECK_THROWS(fidelity_irb(0.5, 0.0));
}

TEST_CASE("noiseless rb decays stay at survival 1") {
    RbConfig config;
    config.n = 1;
    config.depths = {1, 4, 16};
    config.circuits_per_depth = 3;
    config.shots = 64;
    config.seed = 5;
    const RbResult res = run_rb_experiment(NoiseModel::noiseless(), config);
    for (double s : res.mean_survival) CHECK(s == doctest::Approx(1.0));
    CHECK(res.fit.alpha == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.mean_compiled_gates > 0.0);
}

TEST_CASE("1q rb alpha matches the depolarizing composition oracle") {
    const double eps = 4e-3;  // lambda = 1 - 4 eps = 0.984
    const double lam = 1.0 - 4.0 * eps;
    NoiseModel nm = NoiseModel::noiseless();
    nm.sqrt_x0 = PauliChannel::depolarizing(1, eps);
    // S stays noiseless: virtual rotation.
    const double alpha_expected = expected_alpha(1, lam, 1.0, 1.0);

    RbConfig config;
    config.n = 1;
    config.qubit = 0;
    config.depths = {1, 4, 8, 16, 32, 64};
    config.circuits_per_depth = 24;
    config.shots = 512;
    config.seed = 17;
    const RbResult res = run_rb_experiment(nm, config);
    CHECK(std::abs(res.fit.alpha - alpha_expected) < 0.004);
    // RB identity: alpha = 1 - 2 * (per-Clifford average infidelity).
    const double per_clifford_infid = (1.0 - alpha_expected) / 2.0;
    CHECK(fidelity_1q(res.fit.alpha) == doctest::Approx(1.0 - per_clifford_infid).epsilon(5e-3));
}

TEST_CASE("planted-depolarizing irb recovers the CZ fidelity") {
    const double eps = 2.5e-3;  // lambda = 1 - 16 eps = 0.96
    const double lam_cz = 1.0 - 16.0 * eps;
    NoiseModel nm = NoiseModel::noiseless();
    nm.cz = PauliChannel::depolarizing(2, eps);
    const double f_cz = average_gate_fidelity(nm.cz);
    CHECK(f_cz == doctest::Approx((1.0 + 3.0 * lam_cz) / 4.0).epsilon(1e-12));

    RbConfig config;
    config.n = 2;
    config.depths = {1, 2, 4, 6, 9, 13};
    config.circuits_per_depth = 10;
    config.shots = 256;
    config.seed = 23;
    const RbResult ref = run_rb_experiment(nm, config);
    config.interleave_cz = true;
    config.seed = 24;
    const RbResult inter = run_rb_experiment(nm, config);

    // Analytic check of both decays.
    const double alpha_ref_expected = expected_alpha(2, 1.0, 1.0, lam_cz);
    const double alpha_int_expected = expected_alpha(2, 1.0, 1.0, lam_cz, 1);
    CHECK(std::abs(ref.fit.alpha - alpha_ref_expected) < 0.02);
    CHECK(std::abs(inter.fit.alpha - alpha_int_expected) < 0.02);

    const double f_est = fidelity_irb(inter.fit.alpha, ref.fit.alpha);
    CHECK(std::abs(f_est - f_cz) < 0.005);
    CHECK(fidelity_irb_stderr(inter.fit, ref.fit) < 0.02);
}
