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

#include "acesim/rb.hpp"

#include <cmath>
#include <stdexcept>

namespace acesim {

double DecayFit::alpha_stderr() const { return std::sqrt(std::max(cov_aa, 0.0)); }

DecayFit fit_decay(const std::vector<double>& depths, const std::vector<double>& survival,
                   double asymptote) {
    if (depths.size() != survival.size()) throw std::invalid_argument("size mismatch");
    std::vector<double> distinct = depths;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw std::invalid_argument("need at least 3 distinct depths");
    for (double y : survival) {
        if (y < 0.0 || y > 1.0) throw std::invalid_argument("survival out of [0,1]");
    }
    bool any_above = false;
    for (double y : survival) {
        if (y > asymptote) any_above = true;
    }
    if (!any_above) throw std::runtime_error("degenerate decay: no survival above the asymptote");

    // Log-linear initialization on the points above the asymptote.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (size_t i = 0; i < depths.size(); ++i) {
        const double dev = survival[i] - asymptote;
        if (dev <= 1e-9) continue;
        const double lx = depths[i], ly = std::log(dev);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    double alpha = 0.95, amp = survival[0] - asymptote;
    if (m >= 2 && (m * sxx - sx * sx) > 1e-12) {
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double icept = (sy - slope * sx) / m;
        alpha = std::clamp(std::exp(slope), 1e-3, 1.0);
        amp = std::clamp(std::exp(icept), 1e-6, 1.0);
    }
    amp = std::max(amp, 1e-6);

    // Levenberg-Marquardt on (B, alpha).
    auto ssr = [&](double b, double a) {
        double s = 0.0;
        for (size_t i = 0; i < depths.size(); ++i) {
            const double r = b * std::pow(a, depths[i]) + asymptote - survival[i];
            s += r * r;
        }
        return s;
    };
    double mu = 1e-6;
    double cur = ssr(amp, alpha);
    for (int it = 0; it < 200; ++it) {
        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jr0 = 0.0, jr1 = 0.0;
        for (size_t i = 0; i < depths.size(); ++i) {
            const double ni = depths[i];
            const double an = std::pow(alpha, ni);
            const double r = amp * an + asymptote - survival[i];
            const double j0 = an;
            const double j1 = amp * ni * ((ni >= 1.0) ? std::pow(alpha, ni - 1.0) : an / alpha);
            jtj00 += j0 * j0;
            jtj01 += j0 * j1;
            jtj11 += j1 * j1;
            jr0 += j0 * r;
            jr1 += j1 * r;
        }
        const double d00 = jtj00 * (1.0 + mu), d11 = jtj11 * (1.0 + mu);
        const double det = d00 * d11 - jtj01 * jtj01;
        if (std::abs(det) < 1e-30) break;
        const double db = (-jr0 * d11 + jr1 * jtj01) / det;
        const double da = (-jr1 * d00 + jr0 * jtj01) / det;
        const double nb = std::clamp(amp + db, 1e-9, 2.0);
        const double na = std::clamp(alpha + da, 1e-9, 1.0);
        const double next = ssr(nb, na);
        if (next < cur) {
            amp = nb;
            alpha = na;
            mu = std::max(mu * 0.3, 1e-12);
            if (cur - next < 1e-16 * (1.0 + cur)) {
                cur = next;
                break;
            }
            cur = next;
        } else {
            mu *= 3.0;
            if (mu > 1e8) break;
        }
    }

    DecayFit fit;
    fit.amplitude = amp;
    fit.alpha = alpha;
    fit.asymptote = asymptote;
    // Covariance from sigma^2 (J^T J)^{-1}.
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0;
    for (size_t i = 0; i < depths.size(); ++i) {
        const double ni = depths[i];
        const double an = std::pow(alpha, ni);
        const double j0 = an;
        const double j1 = amp * ni * ((ni >= 1.0) ? std::pow(alpha, ni - 1.0) : an / alpha);
        jtj00 += j0 * j0;
        jtj01 += j0 * j1;
        jtj11 += j1 * j1;
    }
    const double dof = std::max<double>(static_cast<double>(depths.size()) - 2.0, 1.0);
    const double sigma2 = cur / dof;
    const double det = jtj00 * jtj11 - jtj01 * jtj01;
    if (std::abs(det) > 1e-30) {
        fit.cov_bb = sigma2 * jtj11 / det;
        fit.cov_aa = sigma2 * jtj00 / det;
        fit.cov_ba = -sigma2 * jtj01 / det;
    }
    return fit;
}

double fidelity_1q(double alpha) {
    if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in (0, 1]");
    return 1.0 - 0.5 * (1.0 - alpha);
}

double fidelity_irb(double alpha_int, double alpha_ref) {
    if (alpha_ref == 0.0) throw std::invalid_argument("reference alpha must be nonzero");
    return 1.0 - 0.75 * (1.0 - alpha_int / alpha_ref);
}

double fidelity_irb_stderr(const DecayFit& fit_int, const DecayFit& fit_ref) {
    const double ai = fit_int.alpha, ar = fit_ref.alpha;
    const double d_int = 0.75 / ar;
    const double d_ref = 0.75 * ai / (ar * ar);
    return std::sqrt(d_int * d_int * std::max(fit_int.cov_aa, 0.0) +
                     d_ref * d_ref * std::max(fit_ref.cov_aa, 0.0));
}

RbResult run_rb_experiment(const NoiseModel& nm, const RbConfig& config) {
    if (config.depths.size() < 3) throw std::invalid_argument("need at least 3 depths");
    RbResult res;
    res.depths = config.depths;
    RunOptions opts;
    opts.gate_twirl = true;
    opts.measurement_twirl = true;
    opts.threads = config.threads;

    // Survival target: |00> for n == 2, the target qubit's 0-marginal for
    // n == 1.
    const uint64_t qubit_bit = 1ULL << (1 - config.qubit);

    double total_gates = 0.0;
    size_t total_cliffords = 0;
    for (size_t di = 0; di < config.depths.size(); ++di) {
        double sum = 0.0, sq = 0.0;
        for (int ci = 0; ci < config.circuits_per_depth; ++ci) {
            Rng seq_rng(derive_seed(config.seed, {0x4b1, di, static_cast<uint64_t>(ci)}));
            RbSequenceSpec spec;
            spec.n = config.n;
            spec.qubit = config.qubit;
            spec.depth = config.depths[di];
            spec.interleave_cz = config.interleave_cz;
            spec.simultaneous_partner = config.simultaneous;
            auto [circuit, drawn] = rb_sequence(spec, seq_rng);
            if (config.injected_rz != 0.0)
                circuit = inject_coherent_error(circuit, config.injected_rz,
                                                config.injection_target);
            for (size_t idx : drawn) total_gates += static_cast<double>(compiled_length(config.n, idx));
            total_cliffords += drawn.size();
            const uint64_t shot_seed =
                derive_seed(config.seed, {0x5b, di, static_cast<uint64_t>(ci)});
            const OutcomeDistribution dist =
                run_shots(circuit, nm, config.shots, shot_seed, opts);
            double survival = 0.0;
            if (config.n == 2) {
                survival = dist.p(0);
            } else {
                for (uint64_t j = 0; j < dist.probs.size(); ++j) {
                    if ((j & qubit_bit) == 0) survival += dist.p(j);
                }
            }
            sum += survival;
            sq += survival * survival;
        }
        const double mean = sum / config.circuits_per_depth;
        res.mean_survival.push_back(mean);
        res.std_survival.push_back(
            std::sqrt(std::max(sq / config.circuits_per_depth - mean * mean, 0.0)));
    }
    std::vector<double> depths_d(res.depths.begin(), res.depths.end());
    res.fit = fit_decay(depths_d, res.mean_survival, config.n == 2 ? 0.25 : 0.5);
    res.mean_compiled_gates =
        total_cliffords > 0 ? total_gates / static_cast<double>(total_cliffords) : 0.0;
    return res;
}

}  // namespace acesim
