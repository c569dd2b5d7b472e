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
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "acesim/circuit.hpp"
#include "acesim/noise_model.hpp"
#include "acesim/rng.hpp"
#include "acesim/simulator.hpp"

namespace acesim {

/// One (circuit, input Pauli, output Pauli) tuple. coeffs[k] counts how often
/// the conjugated trajectory passes gate k's channel with a non-identity
/// restriction to its support; SPAM entries mark the output Pauli's
/// per-qubit components. `sign` is the accumulated conjugation sign, folded
/// into the eigenvalue estimate so fitted eigenvalues are positive.
struct DesignRow {
    int circuit_id = -1;
    PauliString input_pauli;
    PauliString output_pauli;
    std::array<int, kNumParams> coeffs{};
    int sign = 1;
};

/// Conjugates input_p through the circuit and tabulates the row.
/// The circuit must be built from the five-gate set (no Rz, no measurements).
DesignRow compute_row(const Circuit& c, const PauliString& input_p);

/// log Lambda predicted by a model for this row: sum_k coeffs[k] * log
/// lambda_k (identity components contribute nothing).
double predicted_log_eigenvalue(const DesignRow& row,
                                const std::array<double, kNumParams>& lambda);

/// Exact incremental rank over the rationals (fraction-free elimination on
/// arbitrary-precision integers).
class ExactRank {
  public:
    ExactRank();
    ~ExactRank();
    ExactRank(const ExactRank&) = delete;
    ExactRank& operator=(const ExactRank&) = delete;

    /// Returns true (and keeps the row) if it increased the rank.
    bool add_row(const std::array<int, kNumParams>& row);
    int rank() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct DesignPolicy {
    int cz_min = 3;
    int cz_max = 5;
    int pool_target = 95;       // distinct (circuit, input, output) tuples
    int max_circuits = 2000;    // search budget
    int rows_per_circuit = 5;   // cap, Z-type inputs prioritized
};

struct DesignPool {
    std::vector<Circuit> circuits;
    std::vector<DesignRow> rows;
    int rank = 0;
};

/// Random alternating-layer circuits (single-qubit layer sampled from
/// {S, sqrt_x, identity} per qubit, then CZ), 3-5 CZs by default, Z-type
/// input Paulis prioritized. Terminates once the pool has full rank 33 and
/// pool_target rows; throws with the achieved rank and the unidentifiable
/// columns if the budget runs out first.
DesignPool build_design_pool(const DesignPolicy& policy, Rng& rng);

/// A complete set: 33 pool-row indices whose coefficient matrix is full rank.
struct DesignSet {
    std::vector<int> row_indices;  // sorted
};

/// k distinct full-rank 33-row subsets by randomized greedy rank building.
/// Returns fewer (with *found_all = false) if the attempt budget is hit.
std::vector<DesignSet> select_complete_sets(const DesignPool& pool, int k, Rng& rng,
                                            bool* found_all = nullptr);

/// Circuit-eigenvalue estimate from a (mitigated) outcome distribution:
/// Lambda_hat = sign * sum_j (-1)^{parity over the output support} p~_j,
/// clipped into [1e-6, 1] before any logarithm.
struct EigenvalueEstimate {
    double lambda_raw = 0.0;   // before clipping
    double lambda_hat = 0.0;   // clipped into [1e-6, 1]
    double stderr_est = 0.0;   // binomial propagation through MEM
    bool clipped = false;
};

EigenvalueEstimate estimate_circuit_eigenvalue(const DesignRow& row,
                                               const OutcomeDistribution& mitigated,
                                               const OutcomeDistribution* raw = nullptr,
                                               const ConfusionMatrix* mem_matrix = nullptr,
                                               uint64_t shots = 0);

/// Serialization of the pool (circuit refs, Pauli symbols, coefficient maps).
std::string design_pool_to_json(const DesignPool& pool);
DesignPool design_pool_from_json(const std::string& text);

}  // namespace acesim
