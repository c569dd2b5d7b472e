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

#include "acesim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace acesim {

namespace {

constexpr double kLambdaFloor = 1e-12;

// Per-channel coefficients of lambda(p): lambda_nu = 1 - sum_b c[nu][b] p_b
// with c = 2 where the Paulis anticommute, 0 otherwise.
struct ChannelTables {
    // For channel block c: table[sigma-1][b-1] over its non-identity Paulis.
    std::array<std::vector<std::vector<double>>, 7> c;
    ChannelTables() {
        for (int ch = 0; ch < 7; ++ch) {
            const int n = channel7_qubits(static_cast<Channel7>(ch));
            const int d = (1 << (2 * n)) - 1;
            auto& t = c[static_cast<size_t>(ch)];
            t.assign(static_cast<size_t>(d), std::vector<double>(static_cast<size_t>(d), 0.0));
            for (int s = 1; s <= d; ++s) {
                for (int b = 1; b <= d; ++b) {
                    const auto ps = PauliString::from_index(n, static_cast<uint64_t>(s));
                    const auto pb = PauliString::from_index(n, static_cast<uint64_t>(b));
                    t[static_cast<size_t>(s - 1)][static_cast<size_t>(b - 1)] =
                        symplectic_product(ps, pb) ? 2.0 : 0.0;
                }
            }
        }
    }
};

const ChannelTables& tables() {
    static const ChannelTables t;
    return t;
}

// lambda at the 33 parameter positions; false if any is <= floor.
bool eigenvalues_of(const std::array<double, kNumParams>& p,
                    std::array<double, kNumParams>* lam) {
    const auto& tab = tables();
    bool ok = true;
    for (int ch = 0; ch < 7; ++ch) {
        const int base = kChannelParamBase[static_cast<size_t>(ch)];
        const int cnt = kChannelParamCount[static_cast<size_t>(ch)];
        const auto& t = tab.c[static_cast<size_t>(ch)];
        for (int s = 0; s < cnt; ++s) {
            double v = 1.0;
            for (int b = 0; b < cnt; ++b) {
                v -= t[static_cast<size_t>(s)][static_cast<size_t>(b)] *
                     p[static_cast<size_t>(base + b)];
            }
            (*lam)[static_cast<size_t>(base + s)] = v;
            if (v <= kLambdaFloor) ok = false;
        }
    }
    return ok;
}

}  // namespace

int FitProblem::rank() const {
    ExactRank tracker;
    for (const auto& r : a_rows) tracker.add_row(r);
    return tracker.rank();
}

bool objective_and_gradient(const FitProblem& fp, const FitOptions& opts,
                            const std::array<double, kNumParams>& p, double* f,
                            std::array<double, kNumParams>* grad) {
    std::array<double, kNumParams> lam{};
    if (!eigenvalues_of(p, &lam)) {
        *f = std::numeric_limits<double>::infinity();
        if (grad) grad->fill(0.0);
        return false;
    }
    std::array<double, kNumParams> x{};
    for (int k = 0; k < kNumParams; ++k)
        x[static_cast<size_t>(k)] = -std::log(lam[static_cast<size_t>(k)]);

    const size_t rows = fp.num_rows();
    std::array<double, kNumParams> atr{};  // A^T (w . r)
    double obj = 0.0;
    for (size_t mu = 0; mu < rows; ++mu) {
        double ax = 0.0;
        const auto& a = fp.a_rows[mu];
        for (int k = 0; k < kNumParams; ++k) {
            if (a[static_cast<size_t>(k)] != 0) ax += a[static_cast<size_t>(k)] * x[static_cast<size_t>(k)];
        }
        const double r = ax - fp.b[mu];
        const double w = (opts.use_weights && mu < fp.weights.size()) ? fp.weights[mu] : 1.0;
        obj += 0.5 * w * r * r;
        const double wr = w * r;
        for (int k = 0; k < kNumParams; ++k) {
            if (a[static_cast<size_t>(k)] != 0) atr[static_cast<size_t>(k)] += a[static_cast<size_t>(k)] * wr;
        }
    }
    *f = obj;
    if (grad) {
        grad->fill(0.0);
        const auto& tab = tables();
        // dx_nu/dp_k = c[nu][k] / lambda_nu within the channel block.
        for (int ch = 0; ch < 7; ++ch) {
            const int base = kChannelParamBase[static_cast<size_t>(ch)];
            const int cnt = kChannelParamCount[static_cast<size_t>(ch)];
            const auto& t = tab.c[static_cast<size_t>(ch)];
            for (int k = 0; k < cnt; ++k) {
                double g = 0.0;
                for (int s = 0; s < cnt; ++s) {
                    const double c = t[static_cast<size_t>(s)][static_cast<size_t>(k)];
                    if (c != 0.0) {
                        g += atr[static_cast<size_t>(base + s)] * c /
                             lam[static_cast<size_t>(base + s)];
                    }
                }
                (*grad)[static_cast<size_t>(base + k)] = g;
            }
        }
    }
    return true;
}

namespace {

std::array<double, kNumParams> clip_box(const std::array<double, kNumParams>& x,
                                        const FitOptions& opts) {
    std::array<double, kNumParams> out;
    for (int k = 0; k < kNumParams; ++k)
        out[static_cast<size_t>(k)] = std::clamp(x[static_cast<size_t>(k)], opts.lower, opts.upper);
    return out;
}

double projected_gradient_norm(const std::array<double, kNumParams>& x,
                               const std::array<double, kNumParams>& g,
                               const FitOptions& opts) {
    double norm = 0.0;
    for (int k = 0; k < kNumParams; ++k) {
        const double step = std::clamp(x[static_cast<size_t>(k)] - g[static_cast<size_t>(k)],
                                       opts.lower, opts.upper) -
                            x[static_cast<size_t>(k)];
        norm = std::max(norm, std::abs(step));
    }
    return norm;
}

// Jacobian of x(p) restricted to free variables, for the Gauss-Newton polish.
Eigen::MatrixXd jacobian(const FitProblem& fp, const FitOptions& opts,
                         const std::array<double, kNumParams>& lam,
                         const std::vector<int>& free_idx) {
    const auto& tab = tables();
    Eigen::MatrixXd dxdp = Eigen::MatrixXd::Zero(kNumParams, kNumParams);
    for (int ch = 0; ch < 7; ++ch) {
        const int base = kChannelParamBase[static_cast<size_t>(ch)];
        const int cnt = kChannelParamCount[static_cast<size_t>(ch)];
        const auto& t = tab.c[static_cast<size_t>(ch)];
        for (int s = 0; s < cnt; ++s) {
            for (int k = 0; k < cnt; ++k) {
                const double c = t[static_cast<size_t>(s)][static_cast<size_t>(k)];
                if (c != 0.0) dxdp(base + s, base + k) = c / lam[static_cast<size_t>(base + s)];
            }
        }
    }
    Eigen::MatrixXd a(static_cast<long>(fp.num_rows()), kNumParams);
    for (size_t mu = 0; mu < fp.num_rows(); ++mu) {
        const double w = (opts.use_weights && mu < fp.weights.size())
                             ? std::sqrt(fp.weights[mu])
                             : 1.0;
        for (int k = 0; k < kNumParams; ++k)
            a(static_cast<long>(mu), k) = w * fp.a_rows[mu][static_cast<size_t>(k)];
    }
    Eigen::MatrixXd full = a * dxdp;
    Eigen::MatrixXd j(full.rows(), static_cast<long>(free_idx.size()));
    for (size_t i = 0; i < free_idx.size(); ++i) j.col(static_cast<long>(i)) = full.col(free_idx[i]);
    return j;
}

Eigen::VectorXd residual_vector(const FitProblem& fp, const FitOptions& opts,
                                const std::array<double, kNumParams>& x) {
    Eigen::VectorXd r(static_cast<long>(fp.num_rows()));
    for (size_t mu = 0; mu < fp.num_rows(); ++mu) {
        double ax = 0.0;
        for (int k = 0; k < kNumParams; ++k)
            ax += fp.a_rows[mu][static_cast<size_t>(k)] * x[static_cast<size_t>(k)];
        const double w = (opts.use_weights && mu < fp.weights.size())
                             ? std::sqrt(fp.weights[mu])
                             : 1.0;
        r(static_cast<long>(mu)) = w * (ax - fp.b[mu]);
    }
    return r;
}

void finalize_estimate(const FitProblem& fp, ErrorModelEstimate* est) {
    est->noise_model = NoiseModel::from_params(est->params);
    for (int ch = 0; ch < 7; ++ch) {
        est->fidelities[static_cast<size_t>(ch)] =
            average_gate_fidelity(est->noise_model.channel(static_cast<Channel7>(ch)));
    }
    std::array<double, kNumParams> lam{};
    eigenvalues_of(est->params, &lam);
    std::array<double, kNumParams> x{};
    for (int k = 0; k < kNumParams; ++k)
        x[static_cast<size_t>(k)] = -std::log(std::max(lam[static_cast<size_t>(k)], kLambdaFloor));
    est->residuals.resize(fp.num_rows());
    est->log_residuals.resize(fp.num_rows());
    double sq = 0.0;
    for (size_t mu = 0; mu < fp.num_rows(); ++mu) {
        double ax = 0.0;
        for (int k = 0; k < kNumParams; ++k)
            ax += fp.a_rows[mu][static_cast<size_t>(k)] * x[static_cast<size_t>(k)];
        const double lr = ax - fp.b[mu];
        est->log_residuals[mu] = lr;
        est->residuals[mu] = std::exp(-ax) - std::exp(-fp.b[mu]);
        sq += lr * lr;
    }
    est->objective = std::sqrt(sq);
}

}  // namespace

ErrorModelEstimate fit_bound_constrained(const FitProblem& fp, const FitOptions& opts) {
    if (fp.num_rows() < static_cast<size_t>(kNumParams))
        throw std::invalid_argument("need at least 33 rows");
    ErrorModelEstimate est;
    std::array<double, kNumParams> x;
    x.fill(opts.init);
    x = clip_box(x, opts);

    double f = 0.0;
    std::array<double, kNumParams> g{};
    if (!objective_and_gradient(fp, opts, x, &f, &g))
        throw std::runtime_error("objective not finite at the initial point");

    std::deque<std::pair<std::array<double, kNumParams>, std::array<double, kNumParams>>> mem;
    const size_t mem_max = 10;

    int it = 0;
    for (; it < opts.max_iters; ++it) {
        if (projected_gradient_norm(x, g, opts) < opts.tol) {
            est.converged = true;
            break;
        }
        // Active bounds: at a bound with the gradient pushing outward.
        std::array<bool, kNumParams> active{};
        for (int k = 0; k < kNumParams; ++k) {
            const double xv = x[static_cast<size_t>(k)];
            active[static_cast<size_t>(k)] =
                (xv <= opts.lower + 1e-14 && g[static_cast<size_t>(k)] > 0.0) ||
                (xv >= opts.upper - 1e-14 && g[static_cast<size_t>(k)] < 0.0);
        }
        std::array<double, kNumParams> gm = g;
        for (int k = 0; k < kNumParams; ++k)
            if (active[static_cast<size_t>(k)]) gm[static_cast<size_t>(k)] = 0.0;

        // L-BFGS two-loop on the masked gradient.
        std::array<double, kNumParams> d = gm;
        {
            std::vector<double> alpha(mem.size());
            for (size_t i = mem.size(); i-- > 0;) {
                const auto& [s, yv] = mem[i];
                double sy = 0.0, sd = 0.0;
                for (int k = 0; k < kNumParams; ++k) {
                    sy += s[static_cast<size_t>(k)] * yv[static_cast<size_t>(k)];
                    sd += s[static_cast<size_t>(k)] * d[static_cast<size_t>(k)];
                }
                alpha[i] = sd / sy;
                for (int k = 0; k < kNumParams; ++k)
                    d[static_cast<size_t>(k)] -= alpha[i] * yv[static_cast<size_t>(k)];
            }
            if (!mem.empty()) {
                const auto& [s, yv] = mem.back();
                double sy = 0.0, yy = 0.0;
                for (int k = 0; k < kNumParams; ++k) {
                    sy += s[static_cast<size_t>(k)] * yv[static_cast<size_t>(k)];
                    yy += yv[static_cast<size_t>(k)] * yv[static_cast<size_t>(k)];
                }
                const double h0 = sy / yy;
                for (auto& v : d) v *= h0;
            }
            for (size_t i = 0; i < mem.size(); ++i) {
                const auto& [s, yv] = mem[i];
                double sy = 0.0, yd = 0.0;
                for (int k = 0; k < kNumParams; ++k) {
                    sy += s[static_cast<size_t>(k)] * yv[static_cast<size_t>(k)];
                    yd += yv[static_cast<size_t>(k)] * d[static_cast<size_t>(k)];
                }
                const double beta = yd / sy;
                for (int k = 0; k < kNumParams; ++k)
                    d[static_cast<size_t>(k)] += (alpha[i] - beta) * s[static_cast<size_t>(k)];
            }
        }
        for (auto& v : d) v = -v;
        for (int k = 0; k < kNumParams; ++k)
            if (active[static_cast<size_t>(k)]) d[static_cast<size_t>(k)] = 0.0;
        double descent = 0.0;
        for (int k = 0; k < kNumParams; ++k) descent += d[static_cast<size_t>(k)] * gm[static_cast<size_t>(k)];
        if (!(descent < 0.0)) {
            for (int k = 0; k < kNumParams; ++k) d[static_cast<size_t>(k)] = -gm[static_cast<size_t>(k)];
        }

        // Projected Armijo backtracking; halving also recovers from the
        // nonpositive-eigenvalue barrier.
        double step = 1.0;
        std::array<double, kNumParams> xn{};
        double fn = 0.0;
        std::array<double, kNumParams> gn{};
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int k = 0; k < kNumParams; ++k)
                xn[static_cast<size_t>(k)] = x[static_cast<size_t>(k)] + step * d[static_cast<size_t>(k)];
            xn = clip_box(xn, opts);
            double gxd = 0.0;
            for (int k = 0; k < kNumParams; ++k)
                gxd += g[static_cast<size_t>(k)] * (xn[static_cast<size_t>(k)] - x[static_cast<size_t>(k)]);
            if (objective_and_gradient(fp, opts, xn, &fn, &gn) && fn <= f + 1e-4 * gxd) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // line search failed; polish below

        std::array<double, kNumParams> s{}, yv{};
        double sy = 0.0, ss = 0.0, yy = 0.0;
        for (int k = 0; k < kNumParams; ++k) {
            s[static_cast<size_t>(k)] = xn[static_cast<size_t>(k)] - x[static_cast<size_t>(k)];
            yv[static_cast<size_t>(k)] = gn[static_cast<size_t>(k)] - g[static_cast<size_t>(k)];
            sy += s[static_cast<size_t>(k)] * yv[static_cast<size_t>(k)];
            ss += s[static_cast<size_t>(k)] * s[static_cast<size_t>(k)];
            yy += yv[static_cast<size_t>(k)] * yv[static_cast<size_t>(k)];
        }
        if (sy > 1e-12 * std::sqrt(ss * yy)) {
            mem.emplace_back(s, yv);
            if (mem.size() > mem_max) mem.pop_front();
        }
        x = xn;
        f = fn;
        g = gn;
    }
    est.iterations = it;

    // Projected Gauss-Newton polish: quadratic convergence near the optimum
    // pushes the projected gradient to the 1e-10 contract when L-BFGS stalls.
    for (int polish = 0; polish < 40; ++polish) {
        if (projected_gradient_norm(x, g, opts) < opts.tol) {
            est.converged = true;
            break;
        }
        std::vector<int> free_idx;
        for (int k = 0; k < kNumParams; ++k) {
            const double xv = x[static_cast<size_t>(k)];
            const bool at_lo = xv <= opts.lower + 1e-14 && g[static_cast<size_t>(k)] > 0.0;
            const bool at_hi = xv >= opts.upper - 1e-14 && g[static_cast<size_t>(k)] < 0.0;
            if (!at_lo && !at_hi) free_idx.push_back(k);
        }
        if (free_idx.empty()) break;
        std::array<double, kNumParams> lam{};
        eigenvalues_of(x, &lam);
        std::array<double, kNumParams> xlog{};
        for (int k = 0; k < kNumParams; ++k)
            xlog[static_cast<size_t>(k)] = -std::log(lam[static_cast<size_t>(k)]);
        const Eigen::MatrixXd j = jacobian(fp, opts, lam, free_idx);
        const Eigen::VectorXd r = residual_vector(fp, opts, xlog);
        Eigen::MatrixXd jtj = j.transpose() * j;
        jtj.diagonal().array() += 1e-12 * (1.0 + jtj.diagonal().maxCoeff());
        const Eigen::VectorXd delta = jtj.ldlt().solve(-j.transpose() * r);
        double step = 1.0;
        bool accepted = false;
        std::array<double, kNumParams> xn{}, gn{};
        double fn = 0.0;
        for (int ls = 0; ls < 40; ++ls) {
            xn = x;
            for (size_t i = 0; i < free_idx.size(); ++i)
                xn[static_cast<size_t>(free_idx[i])] += step * delta(static_cast<long>(i));
            xn = clip_box(xn, opts);
            if (objective_and_gradient(fp, opts, xn, &fn, &gn) && fn <= f) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        const bool progress = (f - fn) > 1e-18 * (1.0 + f);
        x = xn;
        f = fn;
        g = gn;
        if (!progress && projected_gradient_norm(x, g, opts) >= opts.tol) break;
    }
    if (projected_gradient_norm(x, g, opts) < opts.tol) est.converged = true;

    est.params = x;
    finalize_estimate(fp, &est);
    return est;
}

std::vector<double> project_simplex_tvd(const std::vector<double>& p) {
    // Any feasible point must move at least the negative mass out of the
    // negative entries and the same amount off the positive ones, so zeroing
    // the negatives and removing that mass from the largest entries attains
    // the minimum TVD = (negative mass).
    std::vector<double> out = p;
    double neg = 0.0;
    for (double& v : out) {
        if (v < 0.0) {
            neg += -v;
            v = 0.0;
        }
    }
    if (neg == 0.0) return out;
    std::vector<size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return out[a] > out[b]; });
    double remaining = neg;
    for (size_t idx : order) {
        if (remaining <= 0.0) break;
        const double take = std::min(out[idx], remaining);
        out[idx] -= take;
        remaining -= take;
    }
    return out;
}

ErrorModelEstimate fit_least_squares_tvd(const FitProblem& fp) {
    if (fp.rank() < kNumParams) throw std::runtime_error("design matrix is rank deficient");
    Eigen::MatrixXd a(static_cast<long>(fp.num_rows()), kNumParams);
    Eigen::VectorXd b(static_cast<long>(fp.num_rows()));
    for (size_t mu = 0; mu < fp.num_rows(); ++mu) {
        for (int k = 0; k < kNumParams; ++k)
            a(static_cast<long>(mu), k) = fp.a_rows[mu][static_cast<size_t>(k)];
        b(static_cast<long>(mu)) = fp.b[mu];
    }
    const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);

    ErrorModelEstimate est;
    for (int ch = 0; ch < 7; ++ch) {
        const int base = kChannelParamBase[static_cast<size_t>(ch)];
        const int cnt = kChannelParamCount[static_cast<size_t>(ch)];
        std::vector<double> lam(static_cast<size_t>(cnt) + 1, 1.0);
        for (int s = 0; s < cnt; ++s) lam[static_cast<size_t>(s + 1)] = std::exp(-x(base + s));
        std::vector<double> probs = inverse_hadamard(lam);
        bool needs_projection = false;
        for (double v : probs) {
            if (v < -1e-12) needs_projection = true;
        }
        if (needs_projection) {
            probs = project_simplex_tvd(probs);
            est.tvd_projected[static_cast<size_t>(ch)] = true;
        }
        for (int s = 0; s < cnt; ++s)
            est.params[static_cast<size_t>(base + s)] = std::max(probs[static_cast<size_t>(s + 1)], 0.0);
    }
    est.converged = true;
    est.iterations = 1;
    finalize_estimate(fp, &est);
    return est;
}

FitProblem make_fit_problem(const DesignPool& pool, const DesignSet& set,
                            const std::vector<EigenvalueEstimate>& estimates,
                            bool exclude_clipped) {
    if (estimates.size() != pool.rows.size())
        throw std::invalid_argument("one estimate per pool row required");
    FitProblem fp;
    for (int idx : set.row_indices) {
        const auto& est = estimates[static_cast<size_t>(idx)];
        if (exclude_clipped && est.clipped) continue;
        fp.a_rows.push_back(pool.rows[static_cast<size_t>(idx)].coeffs);
        fp.b.push_back(-std::log(est.lambda_hat));
        const double se = est.stderr_est;
        fp.weights.push_back(se > 0.0 ? 1.0 / (se * se) : 1.0);
    }
    return fp;
}

ResidualReport residual_report(const std::vector<double>& residuals) {
    ResidualReport rep;
    rep.sorted_abs.reserve(residuals.size());
    double sum = 0.0, sq = 0.0;
    for (double r : residuals) {
        rep.sorted_abs.push_back(std::abs(r));
        sum += r;
        sq += r * r;
    }
    std::sort(rep.sorted_abs.begin(), rep.sorted_abs.end());
    const double m = residuals.empty() ? 0.0 : sum / static_cast<double>(residuals.size());
    rep.mean_signed = m;
    rep.std_dev = residuals.empty()
                      ? 0.0
                      : std::sqrt(std::max(sq / static_cast<double>(residuals.size()) - m * m, 0.0));
    if (!rep.sorted_abs.empty()) rep.median_abs = rep.sorted_abs[rep.sorted_abs.size() / 2];
    return rep;
}

double gradient_check(const FitProblem& fp, const std::array<double, kNumParams>& p,
                      double step, const FitOptions& opts) {
    double f0 = 0.0;
    std::array<double, kNumParams> g{};
    if (!objective_and_gradient(fp, opts, p, &f0, &g))
        throw std::invalid_argument("point is not interior");
    double max_dev = 0.0;
    for (int k = 0; k < kNumParams; ++k) {
        auto pp = p;
        pp[static_cast<size_t>(k)] = p[static_cast<size_t>(k)] + step;
        double fp_ = 0.0;
        objective_and_gradient(fp, opts, pp, &fp_, nullptr);
        pp[static_cast<size_t>(k)] = p[static_cast<size_t>(k)] - step;
        double fm = 0.0;
        objective_and_gradient(fp, opts, pp, &fm, nullptr);
        const double fd = (fp_ - fm) / (2.0 * step);
        max_dev = std::max(max_dev, std::abs(fd - g[static_cast<size_t>(k)]));
    }
    return max_dev;
}

}  // namespace acesim
