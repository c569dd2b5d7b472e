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

#include "acesim/simulator.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "acesim/kernels.hpp"
#include "acesim/rng.hpp"

namespace acesim {

namespace {

constexpr int kMaxQubits = 3;

int dim4(int n) { return 1 << (2 * n); }

// ---------------------------------------------------------------- primitives

struct PermOp {
    std::vector<int32_t> from;
    std::vector<double> sign;
};

PermOp perm_of_tableau(const CliffordTableau& t) {
    const int d = dim4(t.num_qubits());
    PermOp op;
    op.from.assign(static_cast<size_t>(d), 0);
    op.sign.assign(static_cast<size_t>(d), 1.0);
    for (int b = 0; b < d; ++b) {
        const auto [img, sgn] =
            t.conjugate(PauliString::from_index(t.num_qubits(), static_cast<uint64_t>(b)));
        op.from[img.index()] = b;
        op.sign[img.index()] = static_cast<double>(sgn);
    }
    return op;
}

// Diagonal of a Pauli frame gate: applying P maps v_a -> (-1)^<P,a> v_a.
void frame_diag_1q(int pauli_digit, double out[4]) {
    PauliString p(1, 0, 0);
    p.set_digit(0, pauli_digit);
    for (int a = 0; a < 4; ++a) {
        PauliString q(1, 0, 0);
        q.set_digit(0, a);
        out[a] = symplectic_product(p, q) ? -1.0 : 1.0;
    }
}

void frame_diag_2q(int pauli_index, double out[16]) {
    const PauliString p = PauliString::from_index(2, static_cast<uint64_t>(pauli_index));
    for (int a = 0; a < 16; ++a) {
        const PauliString q = PauliString::from_index(2, static_cast<uint64_t>(a));
        out[a] = symplectic_product(p, q) ? -1.0 : 1.0;
    }
}

struct FrameTables {
    double one_q[4][4];
    double two_q[16][16];
    int cz_conj[16];  // index of CZ P CZ^dag
    FrameTables() {
        for (int p = 0; p < 4; ++p) frame_diag_1q(p, one_q[p]);
        for (int p = 0; p < 16; ++p) frame_diag_2q(p, two_q[p]);
        const CliffordTableau cz = CliffordTableau::cz(2, 0, 1);
        for (int p = 0; p < 16; ++p) {
            cz_conj[p] =
                static_cast<int>(cz.conjugate(PauliString::from_index(2, static_cast<uint64_t>(p)))
                                     .first.index());
        }
    }
};

const FrameTables& frame_tables() {
    static const FrameTables t;
    return t;
}

// ------------------------------------------------------------- shot programs

struct Step {
    enum Kind {
        Perm,        // Clifford gate
        Chan1,       // 1q diagonal (channel eigenvalues or frame)
        Chan2,       // 2q diagonal
        Rotate,      // coherent Rz: Givens rotation on X/Y pairs of a qubit
        Ptm1,        // general 1q PTM (measurement error)
        TwirlCz,     // per-shot: sample the CZ pair frame (before half)
        TwirlCzEnd,  // per-shot: apply the conjugated pair (after half)
        TwirlMeas,   // per-shot: sample measurement Paulis, record flips
    } kind;
    PermOp perm;
    int q0 = 0, q1 = 0;
    std::array<double, 16> diag{};
    double mat[16] = {0};
    double angle = 0.0;
    int cz_slot = -1;
};

struct Program {
    int n = 2;
    std::array<double, 2> init_z{1.0, 1.0};  // per-qubit Z coefficient at prep
    std::vector<Step> steps;
    int num_cz_twirls = 0;
    bool meas_twirl_shots = false;
};

void push_perm(Program& prog, const CliffordTableau& t) {
    Step s;
    s.kind = Step::Perm;
    s.perm = perm_of_tableau(t);
    prog.steps.push_back(std::move(s));
}

void push_chan1(Program& prog, int qubit, const std::vector<double>& lam) {
    Step s;
    s.kind = Step::Chan1;
    s.q0 = qubit;
    for (int i = 0; i < 4; ++i) s.diag[static_cast<size_t>(i)] = lam[static_cast<size_t>(i)];
    prog.steps.push_back(std::move(s));
}

void push_chan2(Program& prog, int q0, int q1, const std::vector<double>& lam) {
    Step s;
    s.kind = Step::Chan2;
    s.q0 = q0;
    s.q1 = q1;
    for (int i = 0; i < 16; ++i) s.diag[static_cast<size_t>(i)] = lam[static_cast<size_t>(i)];
    prog.steps.push_back(std::move(s));
}

void push_noiseless_ops(Program& prog, const std::vector<GateOp>& ops, int n) {
    for (const auto& op : ops) {
        if (op.kind == GateKind::Measure) continue;
        if (op.kind == GateKind::Rz) {
            Step s;
            s.kind = Step::Rotate;
            s.q0 = op.qubits[0];
            s.angle = op.angle;
            prog.steps.push_back(std::move(s));
        } else {
            push_perm(prog, tableau_of_op(op, n));
        }
    }
}

/// Compile circuit + model into a step program. `per_shot_twirl` inserts the
/// sampling markers; otherwise twirled quantities take their analytic form.
Program compile_program(const Circuit& c, const NoiseModel& nm, const RunOptions& opts,
                        bool per_shot) {
    c.validate();
    if (c.n > kMaxQubits) throw std::invalid_argument("simulator supports n <= 3");
    if (c.n != 2) throw std::invalid_argument("device programs are two-qubit");
    Program prog;
    prog.n = c.n;
    for (int q = 0; q < 2; ++q) prog.init_z[static_cast<size_t>(q)] = 1.0 - 2.0 * nm.prep_flip[static_cast<size_t>(q)];

    push_noiseless_ops(prog, opts.prep_ops, c.n);

    for (const auto& op : c.ops) {
        if (op.kind == GateKind::Measure) continue;
        if (op.kind == GateKind::Rz) {
            Step s;
            s.kind = Step::Rotate;
            s.q0 = op.qubits[0];
            s.angle = op.angle;
            prog.steps.push_back(std::move(s));
            continue;
        }
        const bool is_cz = op.kind == GateKind::CZ;
        int slot = -1;
        if (is_cz && opts.gate_twirl && per_shot) {
            slot = prog.num_cz_twirls++;
            Step s;
            s.kind = Step::TwirlCz;
            s.q0 = op.qubits[0];
            s.q1 = op.qubits[1];
            s.cz_slot = slot;
            prog.steps.push_back(std::move(s));
        }
        push_perm(prog, tableau_of_op(op, c.n));
        if (const PauliChannel* ch = nm.channel_for_op(op)) {
            const auto lam = ch->eigenvalues();
            if (ch->n == 1) push_chan1(prog, op.qubits[0], lam);
            else push_chan2(prog, op.qubits[0], op.qubits[1], lam);
        }
        if (is_cz && op.injected_rz.has_value()) {
            if (opts.gate_twirl && !per_shot) {
                // Analytic twirl of the injected rotation: a Z channel with
                // p_Z = sin^2(theta/2), i.e. eigenvalues (1, cos, cos, 1).
                const double ct = std::cos(*op.injected_rz);
                push_chan1(prog, op.injected_target, {1.0, ct, ct, 1.0});
            } else {
                Step s;
                s.kind = Step::Rotate;
                s.q0 = op.injected_target;
                s.angle = *op.injected_rz;
                prog.steps.push_back(std::move(s));
            }
        }
        if (is_cz && opts.gate_twirl && per_shot) {
            Step s;
            s.kind = Step::TwirlCzEnd;
            s.q0 = op.qubits[0];
            s.q1 = op.qubits[1];
            s.cz_slot = slot;
            prog.steps.push_back(std::move(s));
        }
    }

    // SPAM channels, then basis changes, then the measurement chain.
    push_chan1(prog, 0, nm.spam0.eigenvalues());
    push_chan1(prog, 1, nm.spam1.eigenvalues());
    push_noiseless_ops(prog, opts.basis_ops, c.n);

    if (opts.measurement_twirl && per_shot) {
        Step s;
        s.kind = Step::TwirlMeas;
        prog.steps.push_back(std::move(s));
        prog.meas_twirl_shots = true;
    }
    for (int q = 0; q < 2; ++q) {
        const auto& me = nm.meas_error[static_cast<size_t>(q)];
        if (!me) continue;
        if (opts.measurement_twirl && !per_shot) {
            // Twirled measurement channel: diagonal of the PTM.
            push_chan1(prog, q, me->diagonal());
        } else {
            Step s;
            s.kind = Step::Ptm1;
            s.q0 = q;
            for (int i = 0; i < 16; ++i) s.mat[i] = me->m[static_cast<size_t>(i)];
            prog.steps.push_back(std::move(s));
        }
    }
    return prog;
}

// ------------------------------------------------------------------ executor

struct ExecState {
    std::array<double, 64> v{};
    std::array<double, 64> scratch{};
    std::vector<int> cz_draws;
    uint64_t flip_mask = 0;
};

void init_vector(const Program& prog, ExecState& st) {
    const int d = dim4(prog.n);
    for (int i = 0; i < d; ++i) st.v[static_cast<size_t>(i)] = 0.0;
    // Z-type strings get the product of per-qubit Z coefficients.
    for (int a = 0; a < d; ++a) {
        const PauliString p = PauliString::from_index(prog.n, static_cast<uint64_t>(a));
        if (p.x_bits != 0) continue;
        double coef = 1.0;
        bool z_only = true;
        for (int q = 0; q < prog.n; ++q) {
            const int dg = p.digit(q);
            if (dg == 3) coef *= prog.init_z[static_cast<size_t>(q)];
            else if (dg != 0) z_only = false;
        }
        if (z_only) st.v[static_cast<size_t>(a)] = coef;
    }
}

void apply_rotation(double* v, int n, int qubit, double angle) {
    // Rz(theta): X -> cos X + sin Y, Y -> cos Y - sin X on the target digit.
    const double c = std::cos(angle), s = std::sin(angle);
    const int stride = kernels::digit_stride(n, qubit);
    const int d = dim4(n);
    for (int base = 0; base < d; base += 4 * stride) {
        double* px = v + base + stride;      // digit X
        double* py = v + base + 2 * stride;  // digit Y
        for (int i = 0; i < stride; ++i) {
            const double x = px[i], y = py[i];
            px[i] = c * x - s * y;
            py[i] = s * x + c * y;
        }
    }
}

// Returns the buffer holding the final vector (v or scratch).
const double* run_program(const Program& prog, ExecState& st, Rng* rng) {
    const auto& k = kernels::ops();
    const auto& ft = frame_tables();
    const int n = prog.n;
    const int d = dim4(n);
    init_vector(prog, st);
    st.flip_mask = 0;
    if (st.cz_draws.size() < static_cast<size_t>(prog.num_cz_twirls))
        st.cz_draws.resize(static_cast<size_t>(prog.num_cz_twirls));
    double* v = st.v.data();
    double* alt = st.scratch.data();
    for (const auto& step : prog.steps) {
        switch (step.kind) {
            case Step::Perm:
                k.signed_permute(alt, v, step.perm.from.data(), step.perm.sign.data(), d);
                std::swap(v, alt);
                break;
            case Step::Chan1:
                k.channel1q(v, n, step.q0, step.diag.data());
                break;
            case Step::Chan2:
                k.channel2q(v, n, step.q0, step.q1, step.diag.data());
                break;
            case Step::Rotate:
                apply_rotation(v, n, step.q0, step.angle);
                break;
            case Step::Ptm1:
                k.ptm1q(v, n, step.q0, step.mat);
                break;
            case Step::TwirlCz: {
                const int p = static_cast<int>(rng->below(16));
                st.cz_draws[static_cast<size_t>(step.cz_slot)] = p;
                k.channel2q(v, n, step.q0, step.q1, ft.two_q[p]);
                break;
            }
            case Step::TwirlCzEnd: {
                const int p = st.cz_draws[static_cast<size_t>(step.cz_slot)];
                k.channel2q(v, n, step.q0, step.q1, ft.two_q[ft.cz_conj[p]]);
                break;
            }
            case Step::TwirlMeas: {
                for (int q = 0; q < n; ++q) {
                    const int dg = static_cast<int>(rng->below(4));
                    if (dg != 0) k.channel1q(v, n, q, ft.one_q[dg]);
                    if (dg == 1 || dg == 2)
                        st.flip_mask |= 1ULL << (n - 1 - q);  // qubit 0 = MSB
                }
                break;
            }
        }
    }
    return v;
}

std::vector<double> outcome_probs(const Program& prog, const double* v) {
    const int n = prog.n;
    const int nout = 1 << n;
    std::vector<double> u(static_cast<size_t>(nout));
    // Gather the Z-type subvector: bit b of the outcome index corresponds to
    // a Z digit on the qubit at bit position b.
    for (int m = 0; m < nout; ++m) {
        PauliString p(n, 0, 0);
        for (int q = 0; q < n; ++q) {
            if ((m >> (n - 1 - q)) & 1) p.set_digit(q, 3);
        }
        u[static_cast<size_t>(m)] = v[p.index()];
    }
    kernels::wht_pow2(u.data(), nout);
    const double scale = 1.0 / static_cast<double>(nout);
    for (double& x : u) x *= scale;
    return u;
}

uint64_t sample_outcome(const std::vector<double>& probs, Rng& rng) {
    double u = rng.unit();
    double acc = 0.0;
    for (size_t j = 0; j + 1 < probs.size(); ++j) {
        acc += std::max(probs[j], 0.0);
        if (u < acc) return j;
    }
    return probs.size() - 1;
}

}  // namespace

double OutcomeDistribution::parity_expectation(uint64_t mask) const {
    double e = 0.0;
    for (size_t j = 0; j < probs.size(); ++j) {
        e += (__builtin_popcountll(j & mask) & 1) ? -probs[j] : probs[j];
    }
    return e;
}

OutcomeDistribution run_exact(const Circuit& c, const NoiseModel& nm, const RunOptions& opts) {
    const Program prog = compile_program(c, nm, opts, /*per_shot=*/false);
    ExecState st;
    const double* v = run_program(prog, st, nullptr);
    OutcomeDistribution dist;
    dist.n = c.n;
    dist.probs = outcome_probs(prog, v);
    return dist;
}

int default_threads() {
    if (const char* env = std::getenv("ACESIM_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

OutcomeDistribution run_shots(const Circuit& c, const NoiseModel& nm, uint64_t shots,
                              uint64_t seed, const RunOptions& opts) {
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    OutcomeDistribution dist;
    dist.n = c.n;
    dist.shots = shots;
    const size_t nout = 1u << c.n;
    dist.counts.assign(nout, 0);

    const bool per_shot_random =
        (opts.gate_twirl && c.count_kind(GateKind::CZ) > 0) || opts.measurement_twirl;

    if (!per_shot_random) {
        // No per-shot frame randomness: sample the exact distribution.
        const OutcomeDistribution exact = run_exact(c, nm, opts);
        Rng rng(derive_seed(seed, {0x5a}));
        for (uint64_t s = 0; s < shots; ++s) {
            dist.counts[sample_outcome(exact.probs, rng)]++;
        }
    } else {
        const Program prog = compile_program(c, nm, opts, /*per_shot=*/true);
        const int threads = opts.threads > 0 ? opts.threads : default_threads();
        // Shots are processed in fixed 256-shot blocks, each with its own
        // derived seed, so results do not depend on the worker count and the
        // generator setup cost is amortized.
        constexpr uint64_t kBlock = 256;
        const uint64_t nblocks = (shots + kBlock - 1) / kBlock;
        const int nworkers = static_cast<int>(std::min<uint64_t>(
            static_cast<uint64_t>(std::max(threads, 1)), nblocks));
        std::vector<std::vector<uint64_t>> partial(
            static_cast<size_t>(nworkers), std::vector<uint64_t>(nout, 0));
        auto work = [&](int w) {
            ExecState st;
            for (uint64_t blk = static_cast<uint64_t>(w); blk < nblocks;
                 blk += static_cast<uint64_t>(nworkers)) {
                Rng rng(derive_seed(seed, {0x7317, blk}));
                const uint64_t hi = std::min(shots, (blk + 1) * kBlock);
                for (uint64_t s = blk * kBlock; s < hi; ++s) {
                    const double* v = run_program(prog, st, &rng);
                    const auto probs = outcome_probs(prog, v);
                    const uint64_t j = sample_outcome(probs, rng) ^ st.flip_mask;
                    partial[static_cast<size_t>(w)][j]++;
                }
            }
        };
        if (nworkers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<size_t>(nworkers));
            for (int w = 0; w < nworkers; ++w) pool.emplace_back(work, w);
            for (auto& t : pool) t.join();
        }
        for (const auto& part : partial) {
            for (size_t j = 0; j < nout; ++j) dist.counts[j] += part[j];
        }
    }

    dist.probs.assign(nout, 0.0);
    for (size_t j = 0; j < nout; ++j) {
        dist.probs[j] = static_cast<double>(dist.counts[j]) / static_cast<double>(shots);
    }
    return dist;
}

OutcomeDistribution apply_confusion(const OutcomeDistribution& dist,
                                    const std::vector<ConfusionMatrix>& per_qubit) {
    if (per_qubit.size() != static_cast<size_t>(dist.n))
        throw std::invalid_argument("need one confusion matrix per qubit");
    OutcomeDistribution out = dist;
    out.counts.clear();
    const size_t nout = dist.probs.size();
    std::vector<double> cur = dist.probs, next(nout);
    for (int q = 0; q < dist.n; ++q) {
        const auto& cm = per_qubit[static_cast<size_t>(q)];
        if (cm.n != 1) throw std::invalid_argument("per-qubit confusion must be 2x2");
        const size_t bit = static_cast<size_t>(1) << (dist.n - 1 - q);
        for (size_t i = 0; i < nout; ++i) {
            const size_t j0 = i & ~bit, j1 = i | bit;
            const int mi = (i & bit) ? 1 : 0;
            next[i] = cm.at(0, mi) * cur[j0] + cm.at(1, mi) * cur[j1];
        }
        cur.swap(next);
    }
    out.probs = cur;
    return out;
}

OutcomeDistribution apply_confusion(const OutcomeDistribution& dist,
                                    const ConfusionMatrix& joint) {
    if (joint.n != dist.n) throw std::invalid_argument("confusion dimension mismatch");
    OutcomeDistribution out = dist;
    out.counts.clear();
    const int nout = joint.dim();
    for (int i = 0; i < nout; ++i) {
        double s = 0.0;
        for (int j = 0; j < nout; ++j) s += joint.at(j, i) * dist.probs[static_cast<size_t>(j)];
        out.probs[static_cast<size_t>(i)] = s;
    }
    return out;
}

OutcomeDistribution mem_mitigate(const OutcomeDistribution& dist, const ConfusionMatrix& joint,
                                 bool clip, bool* warned_negative) {
    if (joint.n != dist.n) throw std::invalid_argument("confusion dimension mismatch");
    const int d = joint.dim();
    // Invert C^T by Gauss-Jordan with partial pivoting.
    std::vector<double> a(static_cast<size_t>(d) * d), inv(static_cast<size_t>(d) * d, 0.0);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) a[static_cast<size_t>(r) * d + c] = joint.at(c, r);
        inv[static_cast<size_t>(r) * d + r] = 1.0;
    }
    double norm_a = 0.0;
    for (int c = 0; c < d; ++c) {
        double s = 0.0;
        for (int r = 0; r < d; ++r) s += std::abs(a[static_cast<size_t>(r) * d + c]);
        norm_a = std::max(norm_a, s);
    }
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r) {
            if (std::abs(a[static_cast<size_t>(r) * d + col]) >
                std::abs(a[static_cast<size_t>(piv) * d + col]))
                piv = r;
        }
        const double pval = a[static_cast<size_t>(piv) * d + col];
        if (std::abs(pval) < 1e-14) throw std::runtime_error("singular confusion matrix");
        if (piv != col) {
            for (int c = 0; c < d; ++c) {
                std::swap(a[static_cast<size_t>(piv) * d + c], a[static_cast<size_t>(col) * d + c]);
                std::swap(inv[static_cast<size_t>(piv) * d + c],
                          inv[static_cast<size_t>(col) * d + c]);
            }
        }
        const double ip = 1.0 / a[static_cast<size_t>(col) * d + col];
        for (int c = 0; c < d; ++c) {
            a[static_cast<size_t>(col) * d + c] *= ip;
            inv[static_cast<size_t>(col) * d + c] *= ip;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            const double f = a[static_cast<size_t>(r) * d + col];
            if (f == 0.0) continue;
            for (int c = 0; c < d; ++c) {
                a[static_cast<size_t>(r) * d + c] -= f * a[static_cast<size_t>(col) * d + c];
                inv[static_cast<size_t>(r) * d + c] -= f * inv[static_cast<size_t>(col) * d + c];
            }
        }
    }
    double norm_inv = 0.0;
    for (int c = 0; c < d; ++c) {
        double s = 0.0;
        for (int r = 0; r < d; ++r) s += std::abs(inv[static_cast<size_t>(r) * d + c]);
        norm_inv = std::max(norm_inv, s);
    }
    if (norm_a * norm_inv > 1e6)
        throw std::runtime_error("confusion matrix too ill-conditioned for mitigation");

    OutcomeDistribution out = dist;
    out.counts.clear();
    bool negative = false;
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j = 0; j < d; ++j)
            s += inv[static_cast<size_t>(i) * d + j] * dist.probs[static_cast<size_t>(j)];
        if (s < 0.0) negative = true;
        out.probs[static_cast<size_t>(i)] = (clip && s < 0.0) ? 0.0 : s;
    }
    if (warned_negative) *warned_negative = negative;
    return out;
}

ConfusionMatrix estimate_confusion(const NoiseModel& nm, uint64_t shots_per_state, uint64_t seed,
                                   bool twirl_measurement) {
    const int n = 2;
    const int nstates = 1 << n;
    ConfusionMatrix cm(n);
    const auto& ft = frame_tables();
    const auto& k = kernels::ops();
    for (int j = 0; j < nstates; ++j) {
        std::vector<uint64_t> counts(static_cast<size_t>(nstates), 0);
        ExecState st;
        // Basis state |j> with the model's preparation flips: calibration
        // cannot avoid prep error, so MEM absorbs its end-of-line average.
        // Gate and SPAM channels stay out of calibration.
        Program prog;
        prog.n = n;
        for (int q = 0; q < n; ++q) {
            const double sgn = ((j >> (n - 1 - q)) & 1) ? -1.0 : 1.0;
            prog.init_z[static_cast<size_t>(q)] =
                sgn * (1.0 - 2.0 * nm.prep_flip[static_cast<size_t>(q)]);
        }
        constexpr uint64_t kBlock = 256;
        const uint64_t nblocks = (shots_per_state + kBlock - 1) / kBlock;
        for (uint64_t blk = 0; blk < nblocks; ++blk) {
            Rng rng(derive_seed(seed, {0xca1, static_cast<uint64_t>(j), blk}));
            const uint64_t hi = std::min(shots_per_state, (blk + 1) * kBlock);
            for (uint64_t s = blk * kBlock; s < hi; ++s) {
                init_vector(prog, st);
                st.flip_mask = 0;
                double* v = st.v.data();
                if (twirl_measurement) {
                    for (int q = 0; q < n; ++q) {
                        const int dg = static_cast<int>(rng.below(4));
                        if (dg != 0) k.channel1q(v, n, q, ft.one_q[dg]);
                        if (dg == 1 || dg == 2) st.flip_mask |= 1ULL << (n - 1 - q);
                    }
                }
                for (int q = 0; q < n; ++q) {
                    const auto& me = nm.meas_error[static_cast<size_t>(q)];
                    if (me) k.ptm1q(v, n, q, me->m.data());
                }
                const auto probs = outcome_probs(prog, v);
                const uint64_t out = sample_outcome(probs, rng) ^ st.flip_mask;
                counts[out]++;
            }
        }
        for (int i = 0; i < nstates; ++i) {
            cm.at(j, i) = static_cast<double>(counts[static_cast<size_t>(i)]) /
                          static_cast<double>(shots_per_state);
        }
    }
    return cm;
}

ConfusionMatrix marginal_confusion(const ConfusionMatrix& joint, int qubit) {
    ConfusionMatrix out(1);
    const int n = joint.n;
    const int d = joint.dim();
    const int states_per_bit = d / 2;
    for (int tb = 0; tb < 2; ++tb) {
        for (int mb = 0; mb < 2; ++mb) {
            double acc = 0.0;
            for (int t = 0; t < d; ++t) {
                if (((t >> (n - 1 - qubit)) & 1) != tb) continue;
                for (int m = 0; m < d; ++m) {
                    if (((m >> (n - 1 - qubit)) & 1) != mb) continue;
                    acc += joint.at(t, m);
                }
            }
            out.at(tb, mb) = acc / static_cast<double>(states_per_bit);
        }
    }
    return out;
}

ConfusionMatrix exact_confusion(const NoiseModel& nm, bool twirl_measurement) {
    const int n = 2;
    ConfusionMatrix joint(n);
    std::vector<ConfusionMatrix> per;
    per.reserve(2);
    for (int q = 0; q < n; ++q) per.push_back(qubit_confusion(nm, q, twirl_measurement));
    for (int t = 0; t < joint.dim(); ++t) {
        for (int m = 0; m < joint.dim(); ++m) {
            double v = 1.0;
            for (int q = 0; q < n; ++q) {
                const int tb = (t >> (n - 1 - q)) & 1;
                const int mb = (m >> (n - 1 - q)) & 1;
                v *= per[static_cast<size_t>(q)].at(tb, mb);
            }
            joint.at(t, m) = v;
        }
    }
    return joint;
}

}  // namespace acesim
