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

#include "acesim/design.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace acesim {

using boost::multiprecision::cpp_int;
using nlohmann::json;

namespace {

int param_column(Channel7 c, uint64_t support_index) {
    // support_index is the base-4 index of the non-identity restriction.
    return kChannelParamBase[static_cast<size_t>(c)] + static_cast<int>(support_index) - 1;
}

Channel7 channel_of_gate(const GateOp& op) {
    switch (op.kind) {
        case GateKind::SqrtX: return op.qubits[0] == 0 ? Channel7::SqrtX0 : Channel7::SqrtX1;
        case GateKind::S: return op.qubits[0] == 0 ? Channel7::S0 : Channel7::S1;
        case GateKind::CZ: return Channel7::CZ;
        default: throw std::invalid_argument("gate kind has no channel column");
    }
}

}  // namespace

DesignRow compute_row(const Circuit& c, const PauliString& input_p) {
    if (c.n != input_p.n) throw std::invalid_argument("Pauli dimension mismatch");
    DesignRow row;
    row.input_pauli = input_p;
    SignedPauli cur = SignedPauli::from_canonical(input_p, 1);
    for (const auto& op : c.ops) {
        if (op.kind == GateKind::Measure || op.kind == GateKind::Rz)
            throw std::invalid_argument("design rows require the bare five-gate set");
        cur = tableau_of_op(op, c.n).conjugate_signed(cur);
        const uint64_t support = cur.p.restricted_index(op.qubits);
        if (support != 0) row.coeffs[static_cast<size_t>(param_column(channel_of_gate(op), support))] += 1;
    }
    row.output_pauli = cur.p;
    row.sign = cur.canonical_sign();
    for (int q = 0; q < c.n; ++q) {
        const int d = row.output_pauli.digit(q);
        if (d != 0) {
            const Channel7 spam = (q == 0) ? Channel7::Spam0 : Channel7::Spam1;
            row.coeffs[static_cast<size_t>(param_column(spam, static_cast<uint64_t>(d)))] += 1;
        }
    }
    return row;
}

double predicted_log_eigenvalue(const DesignRow& row,
                                const std::array<double, kNumParams>& lambda) {
    double acc = 0.0;
    for (int k = 0; k < kNumParams; ++k) {
        if (row.coeffs[static_cast<size_t>(k)] != 0)
            acc += row.coeffs[static_cast<size_t>(k)] * std::log(lambda[static_cast<size_t>(k)]);
    }
    return acc;
}

// ------------------------------------------------------------------ ExactRank

struct ExactRank::Impl {
    // Basis rows in echelon form; pivot_cols[i] is the leading column of
    // basis[i]. Entries gcd-normalized after every elimination.
    std::vector<std::vector<cpp_int>> basis;
    std::vector<int> pivot_cols;
};

ExactRank::ExactRank() : impl_(new Impl) {}
ExactRank::~ExactRank() = default;

int ExactRank::rank() const { return static_cast<int>(impl_->basis.size()); }

bool ExactRank::add_row(const std::array<int, kNumParams>& row) {
    std::vector<cpp_int> v(kNumParams);
    for (int i = 0; i < kNumParams; ++i) v[static_cast<size_t>(i)] = row[static_cast<size_t>(i)];
    for (size_t b = 0; b < impl_->basis.size(); ++b) {
        const int pc = impl_->pivot_cols[b];
        if (v[static_cast<size_t>(pc)] == 0) continue;
        const cpp_int f1 = impl_->basis[b][static_cast<size_t>(pc)];
        const cpp_int f2 = v[static_cast<size_t>(pc)];
        for (int i = 0; i < kNumParams; ++i) {
            v[static_cast<size_t>(i)] =
                v[static_cast<size_t>(i)] * f1 - impl_->basis[b][static_cast<size_t>(i)] * f2;
        }
    }
    int pivot = -1;
    cpp_int g = 0;
    for (int i = 0; i < kNumParams; ++i) {
        if (v[static_cast<size_t>(i)] != 0) {
            if (pivot < 0) pivot = i;
            g = boost::multiprecision::gcd(g, abs(v[static_cast<size_t>(i)]));
        }
    }
    if (pivot < 0) return false;
    if (g > 1) {
        for (auto& x : v) x /= g;
    }
    // Keep basis ordered by pivot column.
    size_t pos = 0;
    while (pos < impl_->pivot_cols.size() && impl_->pivot_cols[pos] < pivot) ++pos;
    impl_->basis.insert(impl_->basis.begin() + static_cast<long>(pos), std::move(v));
    impl_->pivot_cols.insert(impl_->pivot_cols.begin() + static_cast<long>(pos), pivot);
    return true;
}

// ------------------------------------------------------------------- pooling

namespace {

Circuit random_alternating_circuit(const DesignPolicy& policy, Rng& rng) {
    Circuit c(2);
    const int n_cz =
        policy.cz_min + static_cast<int>(rng.below(static_cast<uint64_t>(policy.cz_max - policy.cz_min + 1)));
    for (int layer = 0; layer < n_cz; ++layer) {
        c.start_layer();
        for (int q = 0; q < 2; ++q) {
            switch (rng.below(3)) {
                case 0: c.append(GateOp::s(q)); break;
                case 1: c.append(GateOp::sqrt_x(q)); break;
                default: break;  // identity
            }
        }
        c.start_layer();
        c.append(GateOp::cz(0, 1));
    }
    return c;
}

std::vector<PauliString> prioritized_inputs(Rng& rng) {
    // Z-type inputs first, then the rest shuffled.
    std::vector<PauliString> z_type, others;
    for (uint64_t a = 1; a < 16; ++a) {
        const PauliString p = PauliString::from_index(2, a);
        if (p.x_bits == 0) z_type.push_back(p);
        else others.push_back(p);
    }
    for (size_t i = others.size(); i > 1; --i) {
        std::swap(others[i - 1], others[rng.below(i)]);
    }
    z_type.insert(z_type.end(), others.begin(), others.end());
    return z_type;
}

}  // namespace

DesignPool build_design_pool(const DesignPolicy& policy, Rng& rng) {
    DesignPool pool;
    ExactRank rank_tracker;

    for (int it = 0; it < policy.max_circuits; ++it) {
        if (rank_tracker.rank() == kNumParams &&
            static_cast<int>(pool.rows.size()) >= policy.pool_target)
            break;
        Circuit c = random_alternating_circuit(policy, rng);
        const int cid = static_cast<int>(pool.circuits.size());
        int kept = 0;
        std::vector<DesignRow> circuit_rows;
        for (const auto& input : prioritized_inputs(rng)) {
            if (kept >= policy.rows_per_circuit) break;
            if (static_cast<int>(pool.rows.size()) + kept >= policy.pool_target) break;
            DesignRow row = compute_row(c, input);
            row.circuit_id = cid;
            const bool gained = rank_tracker.add_row(row.coeffs);
            // Redundant rows are kept only while there is room left over
            // after reserving capacity for the missing rank directions.
            const int reserve = kNumParams - rank_tracker.rank();
            const bool room = static_cast<int>(pool.rows.size()) + kept + reserve <
                              policy.pool_target;
            if (gained || room) {
                circuit_rows.push_back(std::move(row));
                ++kept;
            }
        }
        if (!circuit_rows.empty()) {
            pool.circuits.push_back(std::move(c));
            for (auto& r : circuit_rows) pool.rows.push_back(std::move(r));
        }
    }
    pool.rank = rank_tracker.rank();
    if (pool.rank < kNumParams || static_cast<int>(pool.rows.size()) < policy.pool_target) {
        // Report which parameters never appeared; those directions are
        // unidentifiable under this policy.
        std::array<bool, kNumParams> touched{};
        for (const auto& r : pool.rows) {
            for (int k = 0; k < kNumParams; ++k)
                if (r.coeffs[static_cast<size_t>(k)] != 0) touched[static_cast<size_t>(k)] = true;
        }
        std::string missing;
        for (int k = 0; k < kNumParams; ++k) {
            if (!touched[static_cast<size_t>(k)]) {
                if (!missing.empty()) missing += ", ";
                missing += param_label(k);
            }
        }
        throw std::runtime_error(fmt::format(
            "design pool budget exceeded: rank {} of {}, {} rows of {}{}", pool.rank,
            kNumParams, pool.rows.size(), policy.pool_target,
            missing.empty() ? std::string()
                            : fmt::format("; columns never touched: {}", missing)));
    }
    return pool;
}

std::vector<DesignSet> select_complete_sets(const DesignPool& pool, int k, Rng& rng,
                                            bool* found_all) {
    if (pool.rank < kNumParams) throw std::runtime_error("pool is not full rank");
    std::vector<DesignSet> sets;
    std::set<std::vector<int>> seen;
    if (found_all) *found_all = true;
    if (k <= 0) return sets;
    const int max_attempts = std::max(20 * k, 200);
    std::vector<int> order(pool.rows.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    for (int attempt = 0; attempt < max_attempts && static_cast<int>(sets.size()) < k;
         ++attempt) {
        for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        ExactRank tracker;
        std::vector<int> chosen;
        for (int idx : order) {
            if (tracker.add_row(pool.rows[static_cast<size_t>(idx)].coeffs)) {
                chosen.push_back(idx);
                if (tracker.rank() == kNumParams) break;
            }
        }
        if (static_cast<int>(chosen.size()) != kNumParams) continue;
        std::sort(chosen.begin(), chosen.end());
        if (seen.insert(chosen).second) {
            sets.push_back(DesignSet{std::move(chosen)});
        }
    }
    if (static_cast<int>(sets.size()) < k && found_all) *found_all = false;
    return sets;
}

EigenvalueEstimate estimate_circuit_eigenvalue(const DesignRow& row,
                                               const OutcomeDistribution& mitigated,
                                               const OutcomeDistribution* raw,
                                               const ConfusionMatrix* mem_matrix,
                                               uint64_t shots) {
    EigenvalueEstimate est;
    const int n = mitigated.n;
    uint64_t mask = 0;
    for (int q = 0; q < n; ++q) {
        if (row.output_pauli.digit(q) != 0) mask |= 1ULL << (n - 1 - q);
    }
    est.lambda_raw = static_cast<double>(row.sign) * mitigated.parity_expectation(mask);
    est.lambda_hat = std::clamp(est.lambda_raw, 1e-6, 1.0);
    est.clipped = est.lambda_hat != est.lambda_raw;

    if (shots > 0) {
        // Lambda_hat is linear in the raw outcome frequencies: with MEM the
        // coefficient of raw outcome j is w_j = sum_i (+-)_i [(C^T)^{-1}]_ij.
        // Binomial (multinomial) propagation: var = (sum w^2 p - mu^2)/N.
        const size_t nout = mitigated.probs.size();
        std::vector<double> w(nout, 0.0);
        if (mem_matrix) {
            for (size_t j = 0; j < nout; ++j) {
                OutcomeDistribution e;
                e.n = n;
                e.probs.assign(nout, 0.0);
                e.probs[j] = 1.0;
                w[j] = mem_mitigate(e, *mem_matrix).parity_expectation(mask);
            }
        } else {
            for (size_t j = 0; j < nout; ++j)
                w[j] = (__builtin_popcountll(j & mask) & 1) ? -1.0 : 1.0;
        }
        const OutcomeDistribution& basis = (raw != nullptr) ? *raw : mitigated;
        double mu = 0.0, m2 = 0.0;
        for (size_t j = 0; j < nout; ++j) {
            const double pj = std::max(basis.probs[j], 0.0);
            mu += w[j] * pj;
            m2 += w[j] * w[j] * pj;
        }
        const double var = std::max(m2 - mu * mu, 0.0) / static_cast<double>(shots);
        est.stderr_est = std::sqrt(var);
    }
    return est;
}

// -------------------------------------------------------------- serialization

std::string design_pool_to_json(const DesignPool& pool) {
    json j;
    json circuits = json::array();
    for (const auto& c : pool.circuits) circuits.push_back(json::parse(c.to_json()));
    j["circuits"] = std::move(circuits);
    json rows = json::array();
    for (const auto& r : pool.rows) {
        json rj;
        rj["circuit_id"] = r.circuit_id;
        rj["input"] = r.input_pauli.str();
        rj["output"] = r.output_pauli.str();
        rj["sign"] = r.sign;
        json coeffs = json::object();
        for (int k = 0; k < kNumParams; ++k) {
            if (r.coeffs[static_cast<size_t>(k)] != 0)
                coeffs[param_label(k)] = r.coeffs[static_cast<size_t>(k)];
        }
        rj["coeffs"] = std::move(coeffs);
        rows.push_back(std::move(rj));
    }
    j["rows"] = std::move(rows);
    j["rank"] = pool.rank;
    return j.dump(2);
}

DesignPool design_pool_from_json(const std::string& text) {
    const json j = json::parse(text);
    DesignPool pool;
    for (const auto& cj : j.at("circuits")) pool.circuits.push_back(Circuit::from_json(cj.dump()));
    for (const auto& rj : j.at("rows")) {
        DesignRow row = compute_row(pool.circuits[rj.at("circuit_id").get<size_t>()],
                                    PauliString::parse(rj.at("input").get<std::string>()));
        row.circuit_id = rj.at("circuit_id").get<int>();
        if (row.output_pauli.str() != rj.at("output").get<std::string>())
            throw std::runtime_error("design pool json inconsistent with conjugation");
        pool.rows.push_back(std::move(row));
    }
    pool.rank = j.at("rank").get<int>();
    return pool;
}

}  // namespace acesim
