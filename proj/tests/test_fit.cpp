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

#include "acesim/fit.hpp"
#include "oracles.hpp"

using namespace acesim;

namespace {

// Exact (infinite-shot) eigenvalue estimates for every pool row.
std::vector<EigenvalueEstimate> exact_estimates(const DesignPool& pool, const NoiseModel& nm) {
    std::vector<EigenvalueEstimate> out;
    out.reserve(pool.rows.size());
    for (const auto& row : pool.rows) {
        const auto pb = prep_and_basis_circuits(row.input_pauli, row.output_pauli);
        RunOptions opts;
        opts.prep_ops = pb.prep_ops;
        opts.basis_ops = pb.basis_ops;
        opts.gate_twirl = true;
        const auto dist = run_exact(pool.circuits[static_cast<size_t>(row.circuit_id)], nm, opts);
        out.push_back(estimate_circuit_eigenvalue(row, dist));
    }
    return out;
}

DesignPool shared_pool() {
    Rng rng(20250);
    DesignPolicy policy;
    return build_design_pool(policy, rng);
}

}  // namespace

TEST_CASE("analytic gradient matches central differences") {
    const DesignPool pool = shared_pool();
    const NoiseModel nm = NoiseModel::appendix_table();
    const auto est = exact_estimates(pool, nm);
    Rng rng(8);
    const auto sets = select_complete_sets(pool, 2, rng);
    const FitProblem fp = make_fit_problem(pool, sets[0], est);

    for (int trial = 0; trial < 20; ++trial) {
        std::array<double, kNumParams> p{};
        for (auto& v : p) v = 1e-4 + 5e-3 * rng.unit();
        CHECK(gradient_check(fp, p) < 1e-6);
    }

    // Central differences are second order: quartering the deviation when
    // the step halves (checked at steps where truncation dominates).
    std::array<double, kNumParams> p{};
    for (auto& v : p) v = 2e-3 + 1e-3 * rng.unit();
    const double d1 = gradient_check(fp, p, 2e-3);
    const double d2 = gradient_check(fp, p, 1e-3);
    CHECK(d1 / d2 > 2.5);
    CHECK(d1 / d2 < 6.0);

    // Uniform small point, as in the default initialization.
    std::array<double, kNumParams> p0{};
    p0.fill(1e-4);
    CHECK(gradient_check(fp, p0) < 1e-6);
}

TEST_CASE("noiseless data fits to a noiseless model") {
    const DesignPool pool = shared_pool();
    const auto est = exact_estimates(pool, NoiseModel::noiseless());
    Rng rng(9);
    const auto sets = select_complete_sets(pool, 1, rng);
    const auto fit = fit_bound_constrained(make_fit_problem(pool, sets[0], est));
    CHECK(fit.converged);
    for (double v : fit.params) CHECK(v < 1e-8);
    for (double f : fit.fidelities) CHECK(f == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("exact eigenvalues recover the planted model to 1e-6") {
    const DesignPool pool = shared_pool();
    NoiseModel nm = NoiseModel::appendix_table();
    nm.spam0 = PauliChannel(1, {0.985, 0.006, 0.004, 0.005});
    nm.spam1 = PauliChannel(1, {0.991, 0.002, 0.003, 0.004});
    const auto planted = nm.to_params();
    const auto est = exact_estimates(pool, nm);
    Rng rng(10);
    const auto sets = select_complete_sets(pool, 3, rng);
    for (const auto& set : sets) {
        const auto fit = fit_bound_constrained(make_fit_problem(pool, set, est));
        CHECK(fit.converged);
        double max_dp = 0.0;
        for (int k = 0; k < kNumParams; ++k)
            max_dp = std::max(max_dp, std::abs(fit.params[static_cast<size_t>(k)] -
                                               planted[static_cast<size_t>(k)]));
        CHECK(max_dp < 1e-6);
        // Perfect fit: residuals vanish.
        for (double r : fit.residuals) CHECK(std::abs(r) < 1e-8);
    }
}

TEST_CASE("injected rotation shifts the fitted p_IZ by the twirl composition") {
    const DesignPool pool = shared_pool();
    const NoiseModel base = NoiseModel::appendix_table();
    const double dtheta = 0.06 * 2.0 * M_PI;

    // Twirl-composition oracle: compose the CZ channel with the twirled
    // rotation (eigenvalue product, then back to probabilities).
    const double ct = std::cos(dtheta);
    std::vector<double> rot_lam(16, 1.0);
    for (int a = 0; a < 16; ++a) {
        const int d1 = a & 3;  // qubit 1 digit
        if (d1 == 1 || d1 == 2) rot_lam[static_cast<size_t>(a)] = ct;
    }
    const auto cz_lam = base.cz.eigenvalues();
    std::vector<double> comp_lam(16);
    for (size_t a = 0; a < 16; ++a) comp_lam[a] = cz_lam[a] * rot_lam[a];
    const PauliChannel composite = PauliChannel::from_eigenvalues(2, comp_lam);
    const double oracle_piz = composite.probs[static_cast<size_t>(PauliString::parse("IZ").index())];

    // Fit on exact eigenvalues of the injected model.
    DesignPool injected = pool;
    for (auto& c : injected.circuits) c = inject_coherent_error(c, dtheta, 1);
    const auto est = exact_estimates(injected, base);
    Rng rng(11);
    const auto sets = select_complete_sets(pool, 1, rng);
    const auto fit = fit_bound_constrained(make_fit_problem(injected, sets[0], est));
    const double fitted_piz =
        fit.params[static_cast<size_t>(kChannelParamBase[4] +
                                       static_cast<int>(PauliString::parse("IZ").index()) - 1)];
    CHECK(fitted_piz == doctest::Approx(oracle_piz).epsilon(1e-6));

    // The shift sits near sin^2(dtheta/2) (the paper-level reading), within
    // the second-order composition cross terms.
    const double base_piz = base.cz.probs[static_cast<size_t>(PauliString::parse("IZ").index())];
    const double s2 = std::sin(dtheta / 2.0) * std::sin(dtheta / 2.0);
    CHECK(std::abs((fitted_piz - base_piz) - s2) < 2e-3);
}

TEST_CASE("least-squares solution without negatives needs no projection") {
    const DesignPool pool = shared_pool();
    const NoiseModel nm = NoiseModel::appendix_table();
    const auto est = exact_estimates(pool, nm);
    Rng rng(12);
    const auto sets = select_complete_sets(pool, 1, rng);
    const FitProblem fp = make_fit_problem(pool, sets[0], est);
    const auto ls = fit_least_squares_tvd(fp);
    for (bool flag : ls.tvd_projected) CHECK(!flag);
    const auto planted = nm.to_params();
    for (int k = 0; k < kNumParams; ++k) {
        CHECK(std::abs(ls.params[static_cast<size_t>(k)] - planted[static_cast<size_t>(k)]) <
              1e-8);
    }

    FitProblem deficient = fp;
    deficient.a_rows.resize(20);
    deficient.b.resize(20);
    CHECK_THROWS(fit_least_squares_tvd(deficient));
}

TEST_CASE("simplex projection minimizes total variation distance") {
    // One-qubit channel with a negative implied probability.
    const std::vector<double> p = {1.02, 0.05, -0.04, -0.03};
    const auto proj = project_simplex_tvd(p);
    double sum = 0.0;
    for (double v : proj) {
        CHECK(v >= 0.0);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    auto tvd_to = [&](const std::vector<double>& q) {
        double t = 0.0;
        for (size_t i = 0; i < q.size(); ++i) t += 0.5 * std::abs(q[i] - p[i]);
        return t;
    };
    const double ours = tvd_to(proj);
    CHECK(ours == doctest::Approx(0.07).epsilon(1e-12));  // negative mass

    // Coarse grid oracle over the 4-simplex.
    double best = 1e9;
    const int steps = 50;  // resolution 0.02
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; i + j <= steps; ++j) {
            for (int k = 0; i + j + k <= steps; ++k) {
                const double a = static_cast<double>(i) / steps;
                const double b = static_cast<double>(j) / steps;
                const double c = static_cast<double>(k) / steps;
                best = std::min(best, tvd_to({1.0 - a - b - c, a, b, c}));
            }
        }
    }
    CHECK(ours <= best + 1e-9);

    // Random local perturbations cannot beat it.
    Rng rng(13);
    for (int trial = 0; trial < 4000; ++trial) {
        std::vector<double> q = proj;
        const size_t i = rng.below(4), j = rng.below(4);
        const double delta = 0.02 * rng.unit();
        q[i] += delta;
        q[j] -= delta;
        bool valid = true;
        for (double v : q) valid = valid && v >= 0.0;
        if (valid) CHECK(tvd_to(q) >= ours - 1e-12);
    }
}

TEST_CASE("residual report statistics") {
    const auto rep = residual_report({0.01, -0.03, 0.02, -0.02, 0.0});
    CHECK(rep.sorted_abs.front() == doctest::Approx(0.0));
    CHECK(rep.sorted_abs.back() == doctest::Approx(0.03));
    CHECK(rep.median_abs == doctest::Approx(0.02));
    CHECK(rep.mean_signed == doctest::Approx(-0.004));
    CHECK(rep.std_dev == doctest::Approx(std::sqrt(0.0018 / 5.0 - 0.004 * 0.004)));
}

TEST_CASE("fit problem rank and weights") {
    const DesignPool pool = shared_pool();
    const auto est = exact_estimates(pool, NoiseModel::appendix_table());
    Rng rng(14);
    const auto sets = select_complete_sets(pool, 1, rng);
    FitProblem fp = make_fit_problem(pool, sets[0], est);
    CHECK(fp.rank() == kNumParams);
    CHECK(fp.num_rows() == static_cast<size_t>(kNumParams));
}
