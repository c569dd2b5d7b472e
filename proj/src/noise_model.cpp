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

#include "acesim/noise_model.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace acesim {

using nlohmann::json;

std::string channel7_name(Channel7 c) {
    switch (c) {
        case Channel7::SqrtX0: return "sqrt_x_0";
        case Channel7::SqrtX1: return "sqrt_x_1";
        case Channel7::S0: return "s_0";
        case Channel7::S1: return "s_1";
        case Channel7::CZ: return "cz";
        case Channel7::Spam0: return "spam_0";
        case Channel7::Spam1: return "spam_1";
    }
    throw std::logic_error("unreachable");
}

Channel7 channel7_from_name(const std::string& s) {
    for (int i = 0; i < 7; ++i) {
        if (channel7_name(static_cast<Channel7>(i)) == s) return static_cast<Channel7>(i);
    }
    throw std::invalid_argument("unknown channel name: " + s);
}

int channel7_qubits(Channel7 c) { return c == Channel7::CZ ? 2 : 1; }

std::string param_label(int k) {
    for (int c = 6; c >= 0; --c) {
        if (k >= kChannelParamBase[static_cast<size_t>(c)]) {
            const int offset = k - kChannelParamBase[static_cast<size_t>(c)];
            const auto ch = static_cast<Channel7>(c);
            const PauliString p =
                PauliString::from_index(channel7_qubits(ch), static_cast<uint64_t>(offset + 1));
            return channel7_name(ch) + ":" + p.str();
        }
    }
    throw std::invalid_argument("parameter index out of range");
}

NoiseModel NoiseModel::noiseless() {
    NoiseModel nm;
    nm.sqrt_x0 = nm.sqrt_x1 = nm.s0 = nm.s1 = PauliChannel::identity(1);
    nm.spam0 = nm.spam1 = PauliChannel::identity(1);
    nm.cz = PauliChannel::identity(2);
    return nm;
}

namespace {

// Published error-probability table. p_identity is kept as printed; the
// non-identity rates are rescaled so each row sums to one.
PauliChannel table_row_1q(double p_i, double p_x, double p_y, double p_z,
                          const std::string& name, std::vector<std::string>* warnings) {
    const double rest = p_x + p_y + p_z;
    const double scale = (1.0 - p_i) / rest;
    if (warnings && std::abs(p_i + rest - 1.0) > 1e-12) {
        warnings->push_back(fmt::format(
            "{}: row sums to {:.7f}; non-identity rates rescaled by {:.6f}", name,
            p_i + rest, scale));
    }
    return PauliChannel(1, {p_i, p_x * scale, p_y * scale, p_z * scale});
}

}  // namespace

NoiseModel NoiseModel::appendix_table(std::vector<std::string>* warnings) {
    NoiseModel nm = noiseless();
    nm.sqrt_x0 = table_row_1q(0.998, 1.28e-5, 1.65e-3, 1.40e-4, "sqrt_x_0", warnings);
    nm.sqrt_x1 = table_row_1q(0.997, 1.52e-4, 2.00e-3, 1.02e-3, "sqrt_x_1", warnings);
    nm.s0 = table_row_1q(0.999, 1.12e-3, 3.15e-4, 1.09e-4, "s_0", warnings);
    nm.s1 = table_row_1q(0.998, 1.07e-3, 4.29e-4, 9.93e-4, "s_1", warnings);

    const double p_ii = 0.974;
    // order IX IY IZ XI XX XY XZ YI YX YY YZ ZI ZX ZY ZZ
    const std::array<double, 15> cz_rates = {
        1.12e-5, 1.90e-4, 3.45e-3,  // I.
        2.52e-6, 1.23e-4, 4.53e-4, 1.95e-3,  // X.
        1.66e-5, 4.08e-3, 1.05e-4, 7.74e-4,  // Y.
        7.73e-5, 7.24e-3, 7.06e-3, 3.70e-5,  // Z.
    };
    double rest = 0.0;
    for (double v : cz_rates) rest += v;
    const double scale = (1.0 - p_ii) / rest;
    if (warnings && std::abs(p_ii + rest - 1.0) > 1e-12) {
        warnings->push_back(fmt::format(
            "cz: row sums to {:.7f}; non-identity rates rescaled by {:.6f}", p_ii + rest,
            scale));
    }
    std::vector<double> cz_probs(16, 0.0);
    cz_probs[0] = p_ii;
    for (int i = 0; i < 15; ++i) cz_probs[static_cast<size_t>(i + 1)] = cz_rates[static_cast<size_t>(i)] * scale;
    nm.cz = PauliChannel(2, std::move(cz_probs));
    nm.validate();
    return nm;
}

const PauliChannel& NoiseModel::channel(Channel7 c) const {
    switch (c) {
        case Channel7::SqrtX0: return sqrt_x0;
        case Channel7::SqrtX1: return sqrt_x1;
        case Channel7::S0: return s0;
        case Channel7::S1: return s1;
        case Channel7::CZ: return cz;
        case Channel7::Spam0: return spam0;
        case Channel7::Spam1: return spam1;
    }
    throw std::logic_error("unreachable");
}

PauliChannel& NoiseModel::channel(Channel7 c) {
    return const_cast<PauliChannel&>(static_cast<const NoiseModel*>(this)->channel(c));
}

const PauliChannel* NoiseModel::channel_for_op(const GateOp& op) const {
    switch (op.kind) {
        case GateKind::SqrtX: return op.qubits[0] == 0 ? &sqrt_x0 : &sqrt_x1;
        case GateKind::S: return op.qubits[0] == 0 ? &s0 : &s1;
        case GateKind::CZ: return &cz;
        case GateKind::Rz:
        case GateKind::Measure: return nullptr;
    }
    throw std::logic_error("unreachable");
}

std::array<double, kNumParams> NoiseModel::to_params() const {
    std::array<double, kNumParams> p{};
    for (int c = 0; c < 7; ++c) {
        const auto& ch = channel(static_cast<Channel7>(c));
        for (int k = 0; k < kChannelParamCount[static_cast<size_t>(c)]; ++k) {
            p[static_cast<size_t>(kChannelParamBase[static_cast<size_t>(c)] + k)] =
                ch.probs[static_cast<size_t>(k + 1)];
        }
    }
    return p;
}

NoiseModel NoiseModel::from_params(const std::array<double, kNumParams>& p) {
    NoiseModel nm = noiseless();
    for (int c = 0; c < 7; ++c) {
        auto& ch = nm.channel(static_cast<Channel7>(c));
        double sum = 0.0;
        for (int k = 0; k < kChannelParamCount[static_cast<size_t>(c)]; ++k) {
            const double v = p[static_cast<size_t>(kChannelParamBase[static_cast<size_t>(c)] + k)];
            ch.probs[static_cast<size_t>(k + 1)] = v;
            sum += v;
        }
        ch.probs[0] = 1.0 - sum;
    }
    return nm;
}

std::array<double, kNumParams> NoiseModel::to_eigenvalues() const {
    std::array<double, kNumParams> lam{};
    for (int c = 0; c < 7; ++c) {
        const auto ev = channel(static_cast<Channel7>(c)).eigenvalues();
        for (int k = 0; k < kChannelParamCount[static_cast<size_t>(c)]; ++k) {
            lam[static_cast<size_t>(kChannelParamBase[static_cast<size_t>(c)] + k)] =
                ev[static_cast<size_t>(k + 1)];
        }
    }
    return lam;
}

namespace {

json channel_to_json(const PauliChannel& ch) {
    json j = json::object();
    for (size_t a = 0; a < ch.probs.size(); ++a) {
        j[PauliString::from_index(ch.n, a).str()] = ch.probs[a];
    }
    return j;
}

PauliChannel channel_from_json(int n, const json& j) {
    PauliChannel ch = PauliChannel::identity(n);
    double sum_non_identity = 0.0;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const PauliString p = PauliString::parse(it.key());
        if (p.n != n) throw std::invalid_argument("channel key has wrong qubit count");
        ch.probs[p.index()] = it.value().get<double>();
        if (!p.is_identity()) sum_non_identity += it.value().get<double>();
    }
    if (!j.contains(std::string(static_cast<size_t>(n), 'I')))
        ch.probs[0] = 1.0 - sum_non_identity;
    return ch;
}

json meas_error_to_json(const Ptm& r) {
    json j;
    j["ptm"] = r.m;
    return j;
}

}  // namespace

std::string NoiseModel::to_json() const {
    json j;
    for (int c = 0; c < 7; ++c) {
        const auto ch = static_cast<Channel7>(c);
        j["channels"][channel7_name(ch)] = channel_to_json(channel(ch));
    }
    for (int q = 0; q < 2; ++q) {
        if (meas_error[static_cast<size_t>(q)]) {
            j["measurement_error"][std::to_string(q)] =
                meas_error_to_json(*meas_error[static_cast<size_t>(q)]);
        }
    }
    j["prep_flip"] = prep_flip;
    return j.dump(2);
}

NoiseModel NoiseModel::from_json(const std::string& text) {
    const json j = json::parse(text);
    NoiseModel nm = noiseless();
    if (j.contains("channels")) {
        for (auto it = j.at("channels").begin(); it != j.at("channels").end(); ++it) {
            const Channel7 c = channel7_from_name(it.key());
            nm.channel(c) = channel_from_json(channel7_qubits(c), it.value());
        }
    }
    if (j.contains("measurement_error")) {
        for (auto it = j.at("measurement_error").begin(); it != j.at("measurement_error").end();
             ++it) {
            const int q = std::stoi(it.key());
            if (q < 0 || q > 1) throw std::invalid_argument("measurement_error qubit index");
            if (it.value().contains("ptm")) {
                Ptm r(1);
                r.m = it.value().at("ptm").get<std::vector<double>>();
                if (r.m.size() != 16) throw std::invalid_argument("measurement PTM must be 4x4");
                nm.meas_error[static_cast<size_t>(q)] = r;
            } else if (it.value().contains("bitflip")) {
                const double p = it.value().at("bitflip").get<double>();
                Ptm r = Ptm::identity(1);
                r.at(2, 2) = 1.0 - 2.0 * p;
                r.at(3, 3) = 1.0 - 2.0 * p;
                nm.meas_error[static_cast<size_t>(q)] = r;
            } else if (it.value().contains("gamma")) {
                auto [r, c_] = damping_measurement_model(it.value().at("gamma").get<double>(),
                                                         it.value().at("beta").get<double>());
                (void)c_;
                nm.meas_error[static_cast<size_t>(q)] = r;
            }
        }
    }
    if (j.contains("prep_flip")) {
        const auto v = j.at("prep_flip").get<std::vector<double>>();
        if (v.size() != 2) throw std::invalid_argument("prep_flip needs two entries");
        nm.prep_flip = {v[0], v[1]};
    }
    nm.validate();
    return nm;
}

void NoiseModel::validate() {
    for (int c = 0; c < 7; ++c) channel(static_cast<Channel7>(c)).validate();
    for (double p : prep_flip) {
        if (p < 0.0 || p > 1.0) throw std::runtime_error("prep_flip out of range");
    }
    for (const auto& me : meas_error) {
        if (me && !me->is_trace_preserving())
            throw std::runtime_error("measurement-error PTM is not trace preserving");
    }
}

ConfusionMatrix qubit_confusion(const NoiseModel& nm, int qubit, bool twirled) {
    const auto& me = nm.meas_error[static_cast<size_t>(qubit)];
    if (!me) return ConfusionMatrix::identity(1);
    return twirled ? symmetrize_confusion_via_twirl(*me) : confusion_of_ptm(*me);
}

}  // namespace acesim
