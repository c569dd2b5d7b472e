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

#include <array>
#include <string>
#include <vector>

#include "acesim/design.hpp"
#include "acesim/noise_model.hpp"

namespace acesim {

/// Linear system A x = b with x_nu = -log lambda_nu and b_mu = -log
/// Lambda_hat_mu. Rows are integer design-matrix rows; weights (1/stderr^2)
/// are optional and off by default.
struct FitProblem {
    std::vector<std::array<int, kNumParams>> a_rows;
    std::vector<double> b;
    std::vector<double> weights;  // empty = unweighted

    size_t num_rows() const { return a_rows.size(); }
    /// Exact integer rank of A.
    int rank() const;
};

struct FitOptions {
    double lower = 0.0;
    double upper = 0.2;
    double init = 1e-4;     // starting value for every parameter
    double tol = 1e-10;     // projected-gradient sup-norm
    int max_iters = 500;
    bool use_weights = false;
};

/// Fit result: the recovered model, per-channel average gate fidelities,
/// per-row residuals Lambda_pred - Lambda_obs, and optimizer metadata.
struct ErrorModelEstimate {
    NoiseModel noise_model;
    std::array<double, kNumParams> params{};
    std::array<double, 7> fidelities{};  // per Channel7
    std::vector<double> residuals;
    std::vector<double> log_residuals;  // (A x - b) per row
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;  // ||A x(p) - b||_2 at the solution
    std::array<bool, 7> tvd_projected{};  // least-squares path only
};

/// Objective F(p) = 1/2 || A x(p) - b ||^2 (optionally weighted) with its
/// analytic gradient via the chain rule through -log of the per-channel
/// Hadamard transform. Returns false (F = +inf) if any eigenvalue is
/// nonpositive at p.
bool objective_and_gradient(const FitProblem& fp, const FitOptions& opts,
                            const std::array<double, kNumParams>& p, double* f,
                            std::array<double, kNumParams>* grad);

/// Bound-constrained minimization over [lower, upper]^33 by projected
/// L-BFGS with Armijo backtracking (step-halving doubles as the barrier
/// against nonpositive eigenvalues), finished by a projected Gauss-Newton
/// polish on the free variables. Converges when the projected-gradient
/// sup-norm drops below `tol` or after `max_iters` iterations.
ErrorModelEstimate fit_bound_constrained(const FitProblem& fp, const FitOptions& opts = {});

/// Two-step estimator: unconstrained least squares on A x = b, conversion to
/// probabilities per channel, then (where needed) minimal total-variation
/// projection onto the probability simplex. Throws if A is rank deficient.
ErrorModelEstimate fit_least_squares_tvd(const FitProblem& fp);

/// Minimal-TVD projection of a unit-sum vector with possible negative
/// entries onto the probability simplex. Exposed for the oracle tests.
std::vector<double> project_simplex_tvd(const std::vector<double>& p);

/// Assemble the linear system for one complete set: rows from the pool,
/// b = -log(clipped Lambda_hat), optional inverse-variance weights.
FitProblem make_fit_problem(const DesignPool& pool, const DesignSet& set,
                            const std::vector<EigenvalueEstimate>& estimates,
                            bool exclude_clipped = false);

struct ResidualReport {
    std::vector<double> sorted_abs;  // CDF support
    double std_dev = 0.0;            // centered standard deviation
    double mean_signed = 0.0;
    double median_abs = 0.0;
};

ResidualReport residual_report(const std::vector<double>& residuals);

/// Max absolute deviation between the analytic gradient and central finite
/// differences with the given step, at a strictly interior point.
double gradient_check(const FitProblem& fp, const std::array<double, kNumParams>& p,
                      double step = 1e-6, const FitOptions& opts = {});

}  // namespace acesim
