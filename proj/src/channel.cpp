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

#include "acesim/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "acesim/kernels.hpp"

namespace acesim {

namespace {

int qubits_of_length(size_t len) {
    int n = 0;
    size_t v = 1;
    while (v < len) {
        v *= 4;
        ++n;
    }
    if (v != len || len == 0) throw std::invalid_argument("length is not a power of 4");
    return n;
}

}  // namespace

std::vector<double> hadamard_transform(const std::vector<double>& p) {
    const int n = qubits_of_length(p.size());
    std::vector<double> out = p;
    kernels::ops().had4(out.data(), n);
    return out;
}

std::vector<double> inverse_hadamard(const std::vector<double>& lambda) {
    const int n = qubits_of_length(lambda.size());
    std::vector<double> out = lambda;
    kernels::ops().had4(out.data(), n);
    const double scale = 1.0 / static_cast<double>(lambda.size());
    for (double& v : out) v *= scale;
    return out;
}

PauliChannel::PauliChannel(int n_, std::vector<double> probs_) : n(n_), probs(std::move(probs_)) {
    if (probs.size() != (1u << (2 * n))) throw std::invalid_argument("channel length mismatch");
}

PauliChannel PauliChannel::identity(int n) {
    std::vector<double> p(static_cast<size_t>(1) << (2 * n), 0.0);
    p[0] = 1.0;
    return PauliChannel(n, std::move(p));
}

PauliChannel PauliChannel::from_eigenvalues(int n, const std::vector<double>& lambda) {
    PauliChannel ch(n, inverse_hadamard(lambda));
    return ch;
}

PauliChannel PauliChannel::depolarizing(int n, double eps) {
    const size_t len = static_cast<size_t>(1) << (2 * n);
    std::vector<double> p(len, eps);
    p[0] = 1.0 - eps * static_cast<double>(len - 1);
    return PauliChannel(n, std::move(p));
}

std::vector<double> PauliChannel::eigenvalues() const { return hadamard_transform(probs); }

void PauliChannel::validate() {
    double sum = 0.0;
    for (double& v : probs) {
        if (v < -1e-9 || v > 1.0 + 1e-9)
            throw std::runtime_error("invalid Pauli channel: probability out of range");
        if (v < 0.0) v = 0.0;
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::runtime_error("invalid Pauli channel: probabilities do not sum to 1");
}

double average_gate_fidelity(const PauliChannel& ch) {
    const double d = static_cast<double>(1 << ch.n);
    return (d * ch.p_identity() + 1.0) / (d + 1.0);
}

Ptm::Ptm(int n_) : n(n_), m(static_cast<size_t>(1) << (4 * n_), 0.0) {}

Ptm Ptm::identity(int n) {
    Ptm r(n);
    for (int i = 0; i < r.dim(); ++i) r.at(i, i) = 1.0;
    return r;
}

Ptm Ptm::of_pauli_channel(const PauliChannel& ch) {
    Ptm r(ch.n);
    const auto lam = ch.eigenvalues();
    for (int i = 0; i < r.dim(); ++i) r.at(i, i) = lam[static_cast<size_t>(i)];
    return r;
}

std::vector<double> Ptm::diagonal() const {
    std::vector<double> d(static_cast<size_t>(dim()));
    for (int i = 0; i < dim(); ++i) d[static_cast<size_t>(i)] = at(i, i);
    return d;
}

Ptm Ptm::multiplied_by(const Ptm& rhs) const {
    if (n != rhs.n) throw std::invalid_argument("PTM dimension mismatch");
    Ptm out(n);
    const int d = dim();
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
            const double a = at(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < d; ++j) out.at(i, j) += a * rhs.at(k, j);
        }
    }
    return out;
}

bool Ptm::is_trace_preserving(double tol) const {
    if (std::abs(at(0, 0) - 1.0) > tol) return false;
    for (int j = 1; j < dim(); ++j) {
        if (std::abs(at(0, j)) > tol) return false;
    }
    return true;
}

namespace {

Eigen::MatrixXcd pauli_matrix(const PauliString& p) {
    using Mat = Eigen::MatrixXcd;
    const std::complex<double> i(0.0, 1.0);
    Mat sx(2, 2), sy(2, 2), sz(2, 2), id(2, 2);
    id << 1, 0, 0, 1;
    sx << 0, 1, 1, 0;
    sy << 0, -i, i, 0;
    sz << 1, 0, 0, -1;
    Mat out = Mat::Identity(1, 1);
    for (int q = 0; q < p.n; ++q) {
        const Mat* f = &id;
        switch (p.digit(q)) {
            case 1: f = &sx; break;
            case 2: f = &sy; break;
            case 3: f = &sz; break;
            default: break;
        }
        Mat next(out.rows() * 2, out.cols() * 2);
        next.setZero();
        for (int r = 0; r < out.rows(); ++r)
            for (int c = 0; c < out.cols(); ++c)
                next.block(2 * r, 2 * c, 2, 2) = out(r, c) * (*f);
        out = next;
    }
    return out;
}

}  // namespace

Ptm ptm_of_unitary(const Eigen::MatrixXcd& u) {
    const int dim_h = static_cast<int>(u.rows());
    int n = 0;
    while ((1 << n) < dim_h) ++n;
    if ((1 << n) != dim_h || u.cols() != dim_h)
        throw std::invalid_argument("unitary dimension is not a power of 2");
    if (!(u.adjoint() * u).isApprox(Eigen::MatrixXcd::Identity(dim_h, dim_h), 1e-9))
        throw std::invalid_argument("matrix is not unitary within 1e-9");

    Ptm r(n);
    const int d = r.dim();
    std::vector<Eigen::MatrixXcd> paulis;
    paulis.reserve(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a)
        paulis.push_back(pauli_matrix(PauliString::from_index(n, static_cast<uint64_t>(a))));
    for (int b = 0; b < d; ++b) {
        const Eigen::MatrixXcd ub = u * paulis[static_cast<size_t>(b)] * u.adjoint();
        for (int a = 0; a < d; ++a) {
            const std::complex<double> tr = (paulis[static_cast<size_t>(a)] * ub).trace();
            if (std::abs(tr.imag()) > 1e-9 * dim_h)
                throw std::runtime_error("PTM entry has imaginary part");
            r.at(a, b) = tr.real() / static_cast<double>(dim_h);
        }
    }
    return r;
}

PauliChannel twirl_ptm(const Ptm& r) {
    if (!r.is_trace_preserving())
        throw std::invalid_argument("twirl requires a trace-preserving PTM");
    PauliChannel ch(r.n, inverse_hadamard(r.diagonal()));
    ch.validate();
    return ch;
}

ConfusionMatrix::ConfusionMatrix(int n_) : n(n_), m(static_cast<size_t>(1) << (2 * n_), 0.0) {}

ConfusionMatrix ConfusionMatrix::identity(int n) {
    ConfusionMatrix c(n);
    for (int i = 0; i < c.dim(); ++i) c.at(i, i) = 1.0;
    return c;
}

bool ConfusionMatrix::rows_normalized(double tol) const {
    for (int r = 0; r < dim(); ++r) {
        double s = 0.0;
        for (int c = 0; c < dim(); ++c) {
            if (at(r, c) < -tol || at(r, c) > 1.0 + tol) return false;
            s += at(r, c);
        }
        if (std::abs(s - 1.0) > tol) return false;
    }
    return true;
}

ConfusionMatrix confusion_of_ptm(const Ptm& meas_error) {
    if (meas_error.n != 1) throw std::invalid_argument("expected a one-qubit PTM");
    // |E_0> = (|I> + |Z>)/sqrt(2), |E_1> = (|I> - |Z>)/sqrt(2);
    // C_ji = sqrt(d) << E_i | R | E_j >> reduces to the I/Z block of R.
    const double rii = meas_error.at(0, 0), riz = meas_error.at(0, 3);
    const double rzi = meas_error.at(3, 0), rzz = meas_error.at(3, 3);
    ConfusionMatrix c(1);
    c.at(0, 0) = 0.5 * (rii + riz + rzi + rzz);
    c.at(0, 1) = 0.5 * (rii + riz - rzi - rzz);
    c.at(1, 0) = 0.5 * (rii - riz + rzi - rzz);
    c.at(1, 1) = 0.5 * (rii - riz - rzi + rzz);
    return c;
}

std::pair<Ptm, ConfusionMatrix> damping_measurement_model(double gamma, double beta) {
    if (gamma < 0.0 || gamma > 1.0 || beta < 0.0 || beta > 1.0)
        throw std::invalid_argument("damping parameters must lie in [0, 1]");
    Ptm r(1);
    const double s = std::sqrt(1.0 - gamma);
    r.at(0, 0) = 1.0;
    r.at(1, 1) = s;
    r.at(2, 2) = s;
    r.at(3, 0) = gamma * (2.0 * beta - 1.0);
    r.at(3, 3) = 1.0 - gamma;
    ConfusionMatrix c(1);
    c.at(0, 0) = 1.0 + gamma * (beta - 1.0);
    c.at(0, 1) = gamma * (1.0 - beta);
    c.at(1, 0) = gamma * beta;
    c.at(1, 1) = 1.0 - gamma * beta;
    return {r, c};
}

ConfusionMatrix symmetrize_confusion_via_twirl(const Ptm& meas_error) {
    if (meas_error.n != 1) throw std::invalid_argument("expected a one-qubit PTM");
    Ptm diag(1);
    for (int i = 0; i < 4; ++i) diag.at(i, i) = meas_error.at(i, i);
    return confusion_of_ptm(diag);
}

Eigen::MatrixXcd unitary_sqrt_x() {
    const std::complex<double> i(0.0, 1.0);
    Eigen::MatrixXcd u(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    u << r, -i * r, -i * r, r;
    return u;
}

Eigen::MatrixXcd unitary_s() {
    Eigen::MatrixXcd u(2, 2);
    u << 1, 0, 0, std::complex<double>(0.0, 1.0);
    return u;
}

Eigen::MatrixXcd unitary_rz(double theta) {
    Eigen::MatrixXcd u(2, 2);
    u.setZero();
    u(0, 0) = std::exp(std::complex<double>(0.0, -theta / 2.0));
    u(1, 1) = std::exp(std::complex<double>(0.0, theta / 2.0));
    return u;
}

Eigen::MatrixXcd unitary_cz() {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(4, 4);
    u(3, 3) = -1.0;
    return u;
}

}  // namespace acesim
