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

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "acesim/pauli.hpp"

namespace acesim {

/// Symplectic Hadamard transform: lambda_a = sum_b (-1)^<a,b> p_b, where
/// <a,b> is the symplectic product. Involutory up to a factor 4^n; the
/// inverse divides by 4^n. Input length must be a power of 4.
std::vector<double> hadamard_transform(const std::vector<double>& p);
std::vector<double> inverse_hadamard(const std::vector<double>& lambda);

/// Stochastic Pauli channel over n qubits: probability p_a of applying Pauli
/// error P_a. Eigenvalue view lambda = H p (diagonal of the PTM).
struct PauliChannel {
    int n = 0;
    std::vector<double> probs;  // length 4^n, base-4 Pauli order

    PauliChannel() = default;
    PauliChannel(int n_, std::vector<double> probs_);

    static PauliChannel identity(int n);
    static PauliChannel from_eigenvalues(int n, const std::vector<double>& lambda);
    /// Uniform depolarizing with total non-identity probability 15*eps (2q)
    /// or 3*eps (1q): p_a = eps for every a != I.
    static PauliChannel depolarizing(int n, double eps);

    std::vector<double> eigenvalues() const;
    double p_identity() const { return probs[0]; }
    /// Throws if probabilities are outside [-1e-9, 1+1e-9] or do not sum to 1
    /// within 1e-9. Clamps representable negatives to zero.
    void validate();
};

/// Average gate fidelity of a Pauli channel: (d * p_I + 1) / (d + 1), d = 2^n.
double average_gate_fidelity(const PauliChannel& ch);

/// Dense Pauli transfer matrix, row-major 4^n x 4^n;
/// entries R_ab = tr(P_a E(P_b)) / 2^n.
struct Ptm {
    int n = 0;
    std::vector<double> m;

    Ptm() = default;
    explicit Ptm(int n_);
    static Ptm identity(int n);
    static Ptm of_pauli_channel(const PauliChannel& ch);

    int dim() const { return static_cast<int>(1) << (2 * n); }
    double& at(int r, int c) { return m[static_cast<size_t>(r) * dim() + c]; }
    double at(int r, int c) const { return m[static_cast<size_t>(r) * dim() + c]; }
    std::vector<double> diagonal() const;
    Ptm multiplied_by(const Ptm& rhs) const;  // composition: this after rhs
    bool is_trace_preserving(double tol = 1e-9) const;
};

/// PTM of a unitary gate: R_ab = Re tr(P_a U P_b U^dag) / 2^n. Throws if U is
/// not unitary within 1e-9.
Ptm ptm_of_unitary(const Eigen::MatrixXcd& u);

/// Pauli twirl as diagonal extraction: the twirled channel keeps only the
/// diagonal of the PTM; probs = inverse Hadamard of the diagonal. Throws if
/// the resulting probabilities are not a distribution within 1e-9.
PauliChannel twirl_ptm(const Ptm& r);

/// Row-stochastic confusion matrix over 2^n outcomes: rows true, columns
/// measured.
struct ConfusionMatrix {
    int n = 0;
    std::vector<double> m;  // row-major 2^n x 2^n

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int n_);
    static ConfusionMatrix identity(int n);

    int dim() const { return 1 << n; }
    double& at(int r, int c) { return m[static_cast<size_t>(r) * dim() + c]; }
    double at(int r, int c) const { return m[static_cast<size_t>(r) * dim() + c]; }
    bool rows_normalized(double tol = 1e-9) const;
};

/// Confusion matrix of a 1-qubit measurement-error PTM:
/// C_ji = sqrt(d) << E_i | R | E_j >>.
ConfusionMatrix confusion_of_ptm(const Ptm& meas_error);

/// Generalized amplitude damping measurement model with damping probability
/// gamma and steady-state ground probability beta. Returns the exact PTM and
/// its confusion matrix [[1+gamma(beta-1), gamma(1-beta)], [gamma beta,
/// 1-gamma beta]].
std::pair<Ptm, ConfusionMatrix> damping_measurement_model(double gamma, double beta);

/// Confusion of the Pauli-twirled version of a 1-qubit measurement-error
/// channel; symmetric by construction.
ConfusionMatrix symmetrize_confusion_via_twirl(const Ptm& meas_error);

// Fixed gate-set unitaries (dense oracles and PTM construction).
Eigen::MatrixXcd unitary_sqrt_x();          // Rx(+pi/2)
Eigen::MatrixXcd unitary_s();               // diag(1, i)
Eigen::MatrixXcd unitary_rz(double theta);  // diag(e^{-i theta/2}, e^{+i theta/2})
Eigen::MatrixXcd unitary_cz();

}  // namespace acesim
