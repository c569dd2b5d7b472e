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

#include "acesim/cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "acesim/design.hpp"
#include "acesim/fit.hpp"
#include "acesim/rb.hpp"
#include "acesim/rng.hpp"
#include "acesim/simulator.hpp"

namespace acesim {

using nlohmann::json;

namespace {

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir + "/" + name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + dir + "/" + name);
    out << content;
}

std::string num(double v) { return fmt::format("{:.12g}", v); }

struct BoxStats {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

BoxStats box_stats(std::vector<double> v) {
    BoxStats s;
    if (v.empty()) return s;
    std::sort(v.begin(), v.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const size_t lo = static_cast<size_t>(pos);
        const size_t hi = std::min(lo + 1, v.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return v[lo] * (1.0 - frac) + v[hi] * frac;
    };
    s.min = v.front();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    s.max = v.back();
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    return s;
}

std::string confusion_csv(const ConfusionMatrix& c) {
    std::string out = "true_state";
    for (int m = 0; m < c.dim(); ++m) out += fmt::format(",measured_{:0{}b}", m, c.n);
    out += "\n";
    for (int t = 0; t < c.dim(); ++t) {
        out += fmt::format("{:0{}b}", t, c.n);
        for (int m = 0; m < c.dim(); ++m) out += "," + num(c.at(t, m));
        out += "\n";
    }
    return out;
}

json confusion_json(const ConfusionMatrix& c) {
    json rows = json::array();
    for (int t = 0; t < c.dim(); ++t) {
        json row = json::array();
        for (int m = 0; m < c.dim(); ++m) row.push_back(c.at(t, m));
        rows.push_back(std::move(row));
    }
    return rows;
}

json params_json(const std::array<double, kNumParams>& p) {
    json by_channel = json::object();
    for (int ch = 0; ch < 7; ++ch) {
        const auto c7 = static_cast<Channel7>(ch);
        json entries = json::object();
        for (int k = 0; k < kChannelParamCount[static_cast<size_t>(ch)]; ++k) {
            const PauliString pauli =
                PauliString::from_index(channel7_qubits(c7), static_cast<uint64_t>(k + 1));
            entries[pauli.str()] =
                p[static_cast<size_t>(kChannelParamBase[static_cast<size_t>(ch)] + k)];
        }
        by_channel[channel7_name(c7)] = std::move(entries);
    }
    return by_channel;
}

}  // namespace

// ------------------------------------------------------------- configuration

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path,
                                                  const std::string& preset) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), preset);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::string& preset) {
    ExperimentConfig cfg;
    cfg.preset = preset;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        if (j.contains("preset") && j.at("preset").get<std::string>() != preset)
            throw ConfigError(fmt::format("config preset \"{}\" does not match subcommand \"{}\"",
                                          j.at("preset").get<std::string>(), preset));
        if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
        if (j.contains("shots")) cfg.shots = j.at("shots").get<uint64_t>();
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
        if (j.contains("noise_model")) {
            const auto& nmj = j.at("noise_model");
            cfg.noise_source = nmj.value("source", std::string("appendix-table"));
            if (cfg.noise_source == "file") cfg.noise_file = nmj.at("path").get<std::string>();
            else if (cfg.noise_source == "inline")
                cfg.inline_model = NoiseModel::from_json(nmj.at("model").dump());
            else if (cfg.noise_source != "appendix-table" && cfg.noise_source != "noiseless")
                throw ConfigError("unknown noise_model.source: " + cfg.noise_source);
            cfg.readout_bitflip = nmj.value("readout_bitflip", false);
            cfg.prep_bitflip = nmj.value("prep_bitflip", false);
            if (nmj.contains("damping_gamma")) {
                cfg.damping_gamma = nmj.at("damping_gamma").get<double>();
                cfg.damping_beta = nmj.value("damping_beta", 1.0);
            }
        }
        if (j.contains("delta_theta"))
            cfg.delta_theta = j.at("delta_theta").get<std::vector<double>>();
        if (j.contains("injection_target"))
            cfg.injection_target = j.at("injection_target").get<int>();
        if (j.contains("design")) {
            const auto& d = j.at("design");
            cfg.cz_min = d.value("cz_min", cfg.cz_min);
            cfg.cz_max = d.value("cz_max", cfg.cz_max);
            cfg.pool_target = d.value("pool_target", cfg.pool_target);
            cfg.num_design_sets = d.value("num_sets", cfg.num_design_sets);
        }
        if (j.contains("calibration_shots"))
            cfg.calibration_shots = j.at("calibration_shots").get<uint64_t>();
        if (j.contains("optimizer")) {
            cfg.optimizer = j.at("optimizer").get<std::string>();
            if (cfg.optimizer != "bound-constrained" && cfg.optimizer != "least-squares-tvd")
                throw ConfigError("unknown optimizer: " + cfg.optimizer);
        }
        if (j.contains("dtheta_points")) cfg.dtheta_points = j.at("dtheta_points").get<int>();
        if (j.contains("n_cz_values"))
            cfg.n_cz_values = j.at("n_cz_values").get<std::vector<int>>();
        if (j.contains("shot_grid"))
            cfg.shot_grid = j.at("shot_grid").get<std::vector<uint64_t>>();
        if (j.contains("sets_per_level")) cfg.sets_per_level = j.at("sets_per_level").get<int>();
        if (j.contains("rb")) {
            const auto& r = j.at("rb");
            if (r.contains("depths_1q"))
                cfg.rb_depths_1q = r.at("depths_1q").get<std::vector<int>>();
            if (r.contains("depths_2q"))
                cfg.rb_depths_2q = r.at("depths_2q").get<std::vector<int>>();
            cfg.rb_circuits_per_depth = r.value("circuits_per_depth", cfg.rb_circuits_per_depth);
            cfg.rb_shots = r.value("shots", cfg.rb_shots);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    if (cfg.delta_theta.empty()) cfg.delta_theta = {0.0};
    if (cfg.shots < 1) throw ConfigError("shots must be >= 1");
    if (cfg.cz_min < 0 || cfg.cz_max < cfg.cz_min) throw ConfigError("bad CZ range");
    if (cfg.pool_target < kNumParams) throw ConfigError("pool_target must be >= 33");
    if (cfg.injection_target != 0 && cfg.injection_target != 1)
        throw ConfigError("injection_target must be 0 or 1");
    return cfg;
}

NoiseModel ExperimentConfig::build_model(std::vector<std::string>* warnings) const {
    NoiseModel nm;
    if (noise_source == "noiseless") {
        nm = NoiseModel::noiseless();
    } else if (noise_source == "appendix-table") {
        nm = NoiseModel::appendix_table(warnings);
    } else if (noise_source == "inline") {
        if (!inline_model) throw ConfigError("inline noise model missing");
        nm = *inline_model;
    } else if (noise_source == "file") {
        std::ifstream in(noise_file);
        if (!in) throw ConfigError("cannot open noise model file: " + noise_file);
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            nm = NoiseModel::from_json(ss.str());
        } catch (const std::exception& e) {
            throw ConfigError(std::string("bad noise model file: ") + e.what());
        }
    } else {
        throw ConfigError("unknown noise source: " + noise_source);
    }
    if (readout_bitflip) {
        // Classical readout flips p_M0 = 0.02, p_M1 = 0.05.
        const double pm[2] = {0.02, 0.05};
        for (int q = 0; q < 2; ++q) {
            Ptm r = Ptm::identity(1);
            r.at(2, 2) = 1.0 - 2.0 * pm[q];
            r.at(3, 3) = 1.0 - 2.0 * pm[q];
            nm.meas_error[static_cast<size_t>(q)] = r;
        }
    }
    if (prep_bitflip) nm.prep_flip = {0.019, 0.024};
    if (damping_gamma) {
        auto [r, c] = damping_measurement_model(*damping_gamma, damping_beta);
        (void)c;
        nm.meas_error[0] = r;
        nm.meas_error[1] = r;
    }
    try {
        nm.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid noise model: ") + e.what());
    }
    return nm;
}

// --------------------------------------------------------------- twirl demo

int cmd_twirl_demo(const ExperimentConfig& config) {
    std::vector<std::string> warnings;
    const NoiseModel nm = config.build_model(&warnings);

    std::string csv = "n_cz,twirl,delta_theta,p0,stderr\n";
    json fits = json::object();

    for (int n_cz : config.n_cz_values) {
        if (n_cz < 1 || n_cz % 2 == 0) throw ConfigError("n_cz values must be odd and positive");
        for (int twirl = 0; twirl <= 1; ++twirl) {
            std::vector<double> thetas, p0s;
            for (int i = 0; i < config.dtheta_points; ++i) {
                const double theta = 2.0 * M_PI * static_cast<double>(i) /
                                     static_cast<double>(config.dtheta_points - 1);
                Circuit c(2);
                for (int k = 0; k < n_cz; ++k) c.append(GateOp::cz(0, 1));
                c = inject_coherent_error(c, theta, config.injection_target);
                c.append(GateOp::measure(0));
                c.append(GateOp::measure(1));
                RunOptions opts;
                opts.prep_ops = {GateOp::sqrt_x(0), GateOp::sqrt_x(0), GateOp::sqrt_x(1)};
                opts.basis_ops = {GateOp::sqrt_x(1)};
                opts.gate_twirl = twirl == 1;
                opts.measurement_twirl = twirl == 1;
                opts.threads = config.threads;
                const uint64_t seed = derive_seed(
                    config.seed, {1, static_cast<uint64_t>(n_cz), static_cast<uint64_t>(twirl),
                                  static_cast<uint64_t>(i)});
                const auto dist = run_shots(c, nm, config.shots, seed, opts);
                // q0 is prepared in |1>; survival is the q1 = 0 marginal.
                const double p0 = dist.p(0b10) + dist.p(0b00);
                const double se = std::sqrt(std::max(p0 * (1.0 - p0), 1e-12) /
                                            static_cast<double>(config.shots));
                thetas.push_back(theta);
                p0s.push_back(p0);
                csv += fmt::format("{},{},{},{},{}\n", n_cz, twirl ? "on" : "off", num(theta),
                                   num(p0), num(se));
            }
            // Contrast fit against both candidate forms; the SSR gap makes
            // the cos^N / cos(N theta) shapes distinguishable.
            auto fit_amplitude = [&](bool power_form) {
                double acc = 0.0, den = 0.0;
                for (size_t i = 0; i < thetas.size(); ++i) {
                    const double f = power_form ? std::pow(std::cos(thetas[i]), n_cz)
                                                : std::cos(n_cz * thetas[i]);
                    acc += f * (2.0 * p0s[i] - 1.0);
                    den += f * f;
                }
                const double a = den > 0.0 ? acc / den : 0.0;
                double ssr = 0.0;
                for (size_t i = 0; i < thetas.size(); ++i) {
                    const double f = power_form ? std::pow(std::cos(thetas[i]), n_cz)
                                                : std::cos(n_cz * thetas[i]);
                    const double r = 0.5 * (1.0 + a * f) - p0s[i];
                    ssr += r * r;
                }
                return std::pair<double, double>(a, ssr);
            };
            const auto [a_pow, ssr_pow] = fit_amplitude(true);
            const auto [a_cos, ssr_cos] = fit_amplitude(false);
            json fj;
            fj["amplitude_power_form"] = a_pow;
            fj["ssr_power_form"] = ssr_pow;
            fj["amplitude_coherent_form"] = a_cos;
            fj["ssr_coherent_form"] = ssr_cos;
            fj["selected_form"] = (ssr_pow < ssr_cos) ? "cos_power_n" : "cos_n_theta";
            fits[fmt::format("n_cz_{}_{}", n_cz, twirl ? "twirled" : "coherent")] = std::move(fj);
        }
    }

    write_file(config.out_dir, "twirl_curves.csv", csv);
    write_file(config.out_dir, "fits.json", fits.dump(2) + "\n");
    std::string summary = "twirl-demo\n";
    for (const auto& w : warnings) summary += "warning: " + w + "\n";
    for (auto it = fits.begin(); it != fits.end(); ++it) {
        summary += fmt::format("{}: selected {}, A_power={} A_coherent={}\n", it.key(),
                               it.value().at("selected_form").get<std::string>(),
                               num(it.value().at("amplitude_power_form").get<double>()),
                               num(it.value().at("amplitude_coherent_form").get<double>()));
    }
    write_file(config.out_dir, "summary.txt", summary);
    return 0;
}

// ----------------------------------------------------------- confusion demo

int cmd_confusion_demo(const ExperimentConfig& config) {
    std::vector<std::string> warnings;
    const NoiseModel nm = config.build_model(&warnings);

    const ConfusionMatrix raw =
        estimate_confusion(nm, config.shots, derive_seed(config.seed, {2, 0}), false);
    const ConfusionMatrix twirled =
        estimate_confusion(nm, config.shots, derive_seed(config.seed, {2, 1}), true);

    write_file(config.out_dir, "confusion_untwirled.csv", confusion_csv(raw));
    write_file(config.out_dir, "confusion_twirled.csv", confusion_csv(twirled));

    json j;
    j["estimated_untwirled"] = confusion_json(raw);
    j["estimated_twirled"] = confusion_json(twirled);
    j["exact_untwirled"] = confusion_json(exact_confusion(nm, false));
    j["exact_twirled"] = confusion_json(exact_confusion(nm, true));
    j["shots_per_state"] = config.shots;

    std::string summary = "confusion-demo\n";
    for (const auto& w : warnings) summary += "warning: " + w + "\n";
    for (int q = 0; q < 2; ++q) {
        const ConfusionMatrix mr = marginal_confusion(raw, q);
        const ConfusionMatrix mt = marginal_confusion(twirled, q);
        j[fmt::format("qubit_{}_asymmetry_untwirled", q)] = mr.at(0, 1) - mr.at(1, 0);
        j[fmt::format("qubit_{}_asymmetry_twirled", q)] = mt.at(0, 1) - mt.at(1, 0);
        summary += fmt::format("qubit {}: untwirled |C01-C10| = {}, twirled |C01-C10| = {}\n", q,
                               num(std::abs(mr.at(0, 1) - mr.at(1, 0))),
                               num(std::abs(mt.at(0, 1) - mt.at(1, 0))));
    }
    write_file(config.out_dir, "confusion.json", j.dump(2) + "\n");
    write_file(config.out_dir, "summary.txt", summary);
    return 0;
}

// ------------------------------------------------------------- ACES pipeline

namespace {

struct RowData {
    std::vector<EigenvalueEstimate> estimates;  // one per pool row
    uint64_t clip_events = 0;
};

/// Simulate every pool row at `shots` with per-shot twirling and MEM.
RowData simulate_rows(const DesignPool& pool, const NoiseModel& nm,
                      const ConfusionMatrix& mem_matrix, double dtheta, int injection_target,
                      uint64_t shots, uint64_t seed, int threads) {
    RowData data;
    data.estimates.reserve(pool.rows.size());
    for (size_t ri = 0; ri < pool.rows.size(); ++ri) {
        const auto& row = pool.rows[ri];
        Circuit c = pool.circuits[static_cast<size_t>(row.circuit_id)];
        if (dtheta != 0.0) c = inject_coherent_error(c, dtheta, injection_target);
        c.append(GateOp::measure(0));
        c.append(GateOp::measure(1));
        const auto pb = prep_and_basis_circuits(row.input_pauli, row.output_pauli);
        RunOptions opts;
        opts.prep_ops = pb.prep_ops;
        opts.basis_ops = pb.basis_ops;
        opts.gate_twirl = true;
        opts.measurement_twirl = true;
        opts.threads = threads;
        const auto raw = run_shots(c, nm, shots, derive_seed(seed, {3, ri}), opts);
        const auto mitigated = mem_mitigate(raw, mem_matrix);
        const auto est = estimate_circuit_eigenvalue(row, mitigated, &raw, &mem_matrix, shots);
        if (est.clipped) ++data.clip_events;
        data.estimates.push_back(est);
    }
    return data;
}

std::vector<ErrorModelEstimate> fit_all_sets(const DesignPool& pool,
                                             const std::vector<DesignSet>& sets,
                                             const std::vector<EigenvalueEstimate>& estimates,
                                             const std::string& optimizer, int threads) {
    std::vector<ErrorModelEstimate> fits(sets.size());
    const int nworkers = std::max(1, threads > 0 ? threads : default_threads());
    auto work = [&](size_t w) {
        for (size_t i = w; i < sets.size(); i += static_cast<size_t>(nworkers)) {
            const FitProblem fp = make_fit_problem(pool, sets[i], estimates);
            fits[i] = (optimizer == "least-squares-tvd") ? fit_least_squares_tvd(fp)
                                                         : fit_bound_constrained(fp);
        }
    };
    if (nworkers == 1) {
        work(0);
    } else {
        std::vector<std::future<void>> futs;
        futs.reserve(static_cast<size_t>(nworkers));
        for (int w = 0; w < nworkers; ++w)
            futs.push_back(std::async(std::launch::async, work, static_cast<size_t>(w)));
        for (auto& f : futs) f.get();
    }
    return fits;
}

}  // namespace

int cmd_aces_run(const ExperimentConfig& config) {
    std::vector<std::string> warnings;
    const NoiseModel nm = config.build_model(&warnings);

    Rng pool_rng(derive_seed(config.seed, {4}));
    DesignPolicy policy;
    policy.cz_min = config.cz_min;
    policy.cz_max = config.cz_max;
    policy.pool_target = config.pool_target;
    DesignPool pool;
    try {
        pool = build_design_pool(policy, pool_rng);
    } catch (const std::runtime_error& e) {
        throw NumericalError(e.what());
    }

    Rng set_rng(derive_seed(config.seed, {5}));
    bool found_all = true;
    const auto sets = select_complete_sets(pool, config.num_design_sets, set_rng, &found_all);
    if (!found_all)
        warnings.push_back(fmt::format("only {} distinct complete sets found", sets.size()));

    // One MEM calibration per run (no drift in simulation).
    const ConfusionMatrix mem_matrix =
        estimate_confusion(nm, config.calibration_shots, derive_seed(config.seed, {6}), true);

    json fits_json;
    fits_json["true_params"] = params_json(nm.to_params());
    std::string eig_csv =
        "dtheta,shots,row,circuit_id,input,output,sign,lambda_hat,stderr,clipped\n";
    std::string box_csv = "dtheta,gate,min,q1,median,q3,max,mean\n";
    std::string hist_csv = "dtheta,cz_fidelity\n";
    std::string rates_csv = "dtheta,pauli,min,q1,median,q3,max,mean\n";
    std::string cdf_csv = "shots,abs_residual,cumulative_probability\n";
    std::string summary = "aces-run\n";
    for (const auto& w : warnings) summary += "warning: " + w + "\n";
    summary += fmt::format("pool: {} rows, {} circuits, rank {}\n", pool.rows.size(),
                           pool.circuits.size(), pool.rank);
    summary += fmt::format("complete sets: {}\n", sets.size());

    for (size_t ti = 0; ti < config.delta_theta.size(); ++ti) {
        const double dtheta = config.delta_theta[ti];
        const RowData data =
            simulate_rows(pool, nm, mem_matrix, dtheta, config.injection_target, config.shots,
                          derive_seed(config.seed, {7, ti}), config.threads);
        for (size_t ri = 0; ri < pool.rows.size(); ++ri) {
            const auto& row = pool.rows[ri];
            const auto& est = data.estimates[ri];
            eig_csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", num(dtheta), config.shots,
                                   ri, row.circuit_id, row.input_pauli.str(),
                                   row.output_pauli.str(), row.sign, num(est.lambda_hat),
                                   num(est.stderr_est), est.clipped ? 1 : 0);
        }
        const auto fits =
            fit_all_sets(pool, sets, data.estimates, config.optimizer, config.threads);

        json fit_list = json::array();
        std::array<std::vector<double>, 7> fidelities;
        std::array<std::vector<double>, 15> cz_rates;
        for (const auto& f : fits) {
            for (int ch = 0; ch < 7; ++ch)
                fidelities[static_cast<size_t>(ch)].push_back(
                    f.fidelities[static_cast<size_t>(ch)]);
            for (int k = 0; k < 15; ++k)
                cz_rates[static_cast<size_t>(k)].push_back(
                    f.params[static_cast<size_t>(kChannelParamBase[4] + k)]);
            json fj;
            fj["params"] = params_json(f.params);
            fj["fidelities"] = f.fidelities;
            fj["converged"] = f.converged;
            fj["iterations"] = f.iterations;
            fj["objective"] = f.objective;
            fit_list.push_back(std::move(fj));
        }
        fits_json[fmt::format("dtheta_{}", num(dtheta))] = std::move(fit_list);

        for (int ch = 0; ch < 7; ++ch) {
            const BoxStats s = box_stats(fidelities[static_cast<size_t>(ch)]);
            box_csv += fmt::format("{},{},{},{},{},{},{},{}\n", num(dtheta),
                                   channel7_name(static_cast<Channel7>(ch)), num(s.min), num(s.q1),
                                   num(s.median), num(s.q3), num(s.max), num(s.mean));
        }
        for (double f : fidelities[4]) hist_csv += fmt::format("{},{}\n", num(dtheta), num(f));
        for (int k = 0; k < 15; ++k) {
            const PauliString p = PauliString::from_index(2, static_cast<uint64_t>(k + 1));
            const BoxStats s = box_stats(cz_rates[static_cast<size_t>(k)]);
            rates_csv += fmt::format("{},{},{},{},{},{},{},{}\n", num(dtheta), p.str(), num(s.min),
                                     num(s.q1), num(s.median), num(s.q3), num(s.max), num(s.mean));
        }
        const BoxStats cz_box = box_stats(fidelities[4]);
        summary += fmt::format("dtheta={}: clip events {}, median CZ fidelity {}, mean {}\n",
                               num(dtheta), data.clip_events, num(cz_box.median), num(cz_box.mean));

        // Residual CDFs across shot levels for the first injection point.
        if (ti == 0) {
            for (const uint64_t level : {uint64_t{100}, uint64_t{1000}, uint64_t{10000}}) {
                const RowData level_data =
                    simulate_rows(pool, nm, mem_matrix, dtheta, config.injection_target, level,
                                  derive_seed(config.seed, {8, level}), config.threads);
                const auto level_fits = fit_all_sets(pool, sets, level_data.estimates,
                                                     config.optimizer, config.threads);
                std::vector<double> all_res;
                for (const auto& f : level_fits)
                    all_res.insert(all_res.end(), f.residuals.begin(), f.residuals.end());
                const ResidualReport rep = residual_report(all_res);
                for (size_t i = 0; i < rep.sorted_abs.size(); ++i) {
                    cdf_csv += fmt::format("{},{},{}\n", level, num(rep.sorted_abs[i]),
                                           num(static_cast<double>(i + 1) /
                                               static_cast<double>(rep.sorted_abs.size())));
                }
                summary += fmt::format("residuals at {} shots: median |r| = {}, std = {}\n",
                                       level, num(rep.median_abs), num(rep.std_dev));
            }
        }
    }

    write_file(config.out_dir, "model.json", nm.to_json() + "\n");
    write_file(config.out_dir, "design_pool.json", design_pool_to_json(pool) + "\n");
    json calib;
    calib["estimated"] = confusion_json(mem_matrix);
    calib["exact"] = confusion_json(exact_confusion(nm, true));
    calib["shots_per_state"] = config.calibration_shots;
    write_file(config.out_dir, "confusion_calibration.json", calib.dump(2) + "\n");
    write_file(config.out_dir, "eigenvalues.csv", eig_csv);
    write_file(config.out_dir, "fits.json", fits_json.dump(2) + "\n");
    write_file(config.out_dir, "fidelity_box.csv", box_csv);
    write_file(config.out_dir, "cz_fidelity_hist.csv", hist_csv);
    write_file(config.out_dir, "cz_pauli_rates.csv", rates_csv);
    write_file(config.out_dir, "residual_cdf.csv", cdf_csv);
    write_file(config.out_dir, "summary.txt", summary);
    return 0;
}

// --------------------------------------------------------- appendix models

int cmd_appendix_models(const ExperimentConfig& config) {
    std::vector<std::string> warnings;
    // Model I: table gate errors, ideal prep and measure. II adds readout
    // flips, III adds prep flips, IV both.
    const NoiseModel base = NoiseModel::appendix_table(&warnings);
    std::array<NoiseModel, 4> models = {base, base, base, base};
    {
        const double pm[2] = {0.02, 0.05};
        for (int q = 0; q < 2; ++q) {
            Ptm r = Ptm::identity(1);
            r.at(2, 2) = 1.0 - 2.0 * pm[q];
            r.at(3, 3) = 1.0 - 2.0 * pm[q];
            models[1].meas_error[static_cast<size_t>(q)] = r;
            models[3].meas_error[static_cast<size_t>(q)] = r;
        }
        models[2].prep_flip = {0.019, 0.024};
        models[3].prep_flip = {0.019, 0.024};
    }

    Rng pool_rng(derive_seed(config.seed, {10}));
    DesignPolicy policy;
    policy.cz_min = config.cz_min;
    policy.cz_max = config.cz_max;
    policy.pool_target = config.pool_target;
    DesignPool pool;
    try {
        pool = build_design_pool(policy, pool_rng);
    } catch (const std::runtime_error& e) {
        throw NumericalError(e.what());
    }
    Rng set_rng(derive_seed(config.seed, {11}));
    const auto sets = select_complete_sets(pool, config.sets_per_level, set_rng);

    std::string res_csv = "model,shots,residual_std,median_abs_residual,mean_signed_residual\n";
    std::string summary = "appendix-models\n";
    for (const auto& w : warnings) summary += "warning: " + w + "\n";

    std::array<std::vector<std::pair<uint64_t, double>>, 4> std_curves;
    for (int m = 0; m < 4; ++m) {
        // Generous calibration keeps MEM noise below the shot noise at the
        // top of the grid.
        const ConfusionMatrix mem_matrix = estimate_confusion(
            models[static_cast<size_t>(m)], std::max<uint64_t>(config.calibration_shots, 1000000),
            derive_seed(config.seed, {12, static_cast<uint64_t>(m)}), true);
        for (uint64_t shots : config.shot_grid) {
            const RowData data = simulate_rows(
                pool, models[static_cast<size_t>(m)], mem_matrix, 0.0, config.injection_target,
                shots, derive_seed(config.seed, {13, static_cast<uint64_t>(m), shots}),
                config.threads);
            const auto fits =
                fit_all_sets(pool, sets, data.estimates, "bound-constrained", config.threads);
            std::vector<double> all_res;
            for (const auto& f : fits)
                all_res.insert(all_res.end(), f.residuals.begin(), f.residuals.end());
            const ResidualReport rep = residual_report(all_res);
            res_csv += fmt::format("{},{},{},{},{}\n", m + 1, shots, num(rep.std_dev),
                                   num(rep.median_abs), num(rep.mean_signed));
            std_curves[static_cast<size_t>(m)].emplace_back(shots, rep.std_dev);
        }
    }

    for (int m = 0; m < 4; ++m) {
        const auto& curve = std_curves[static_cast<size_t>(m)];
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (const auto& [shots, sd] : curve) {
            const double lx = std::log10(static_cast<double>(shots));
            const double ly = std::log10(std::max(sd, 1e-12));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double n = static_cast<double>(curve.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        summary += fmt::format("model {}: log-log slope {} (final std {})\n", m + 1, num(slope),
                               num(curve.back().second));
    }

    // Optimizer comparison on noisy instances where the TVD projection
    // triggers.
    std::string opt_csv = "instance,projected,mean_signed_ls_tvd,mean_signed_bound\n";
    int projected_found = 0;
    double pooled_tvd = 0.0, pooled_bound = 0.0;
    size_t pooled_rows = 0;
    const uint64_t opt_shots = 1000;
    const ConfusionMatrix ident_mem = ConfusionMatrix::identity(2);
    for (int inst = 0; inst < 200 && projected_found < 20; ++inst) {
        const RowData data = simulate_rows(
            pool, models[0], ident_mem, 0.0, config.injection_target, opt_shots,
            derive_seed(config.seed, {14, static_cast<uint64_t>(inst)}), config.threads);
        const FitProblem fp =
            make_fit_problem(pool, sets[static_cast<size_t>(inst) % sets.size()], data.estimates);
        const auto ls = fit_least_squares_tvd(fp);
        bool projected = false;
        for (bool flag : ls.tvd_projected) projected = projected || flag;
        if (!projected) continue;
        ++projected_found;
        const auto bc = fit_bound_constrained(fp);
        const ResidualReport rls = residual_report(ls.residuals);
        const ResidualReport rbc = residual_report(bc.residuals);
        opt_csv +=
            fmt::format("{},{},{},{}\n", inst, 1, num(rls.mean_signed), num(rbc.mean_signed));
        for (double r : ls.residuals) pooled_tvd += r;
        for (double r : bc.residuals) pooled_bound += r;
        pooled_rows += ls.residuals.size();
    }
    if (pooled_rows > 0) {
        pooled_tvd /= static_cast<double>(pooled_rows);
        pooled_bound /= static_cast<double>(pooled_rows);
    }
    summary += fmt::format(
        "optimizer comparison: {} projected instances, mean signed residual ls+tvd {}, "
        "bound-constrained {}\n",
        projected_found, num(pooled_tvd), num(pooled_bound));

    write_file(config.out_dir, "residual_vs_shots.csv", res_csv);
    write_file(config.out_dir, "optimizer_comparison.csv", opt_csv);
    write_file(config.out_dir, "summary.txt", summary);
    return 0;
}

// ----------------------------------------------------------------------- rb

int cmd_rb(const ExperimentConfig& config) {
    std::vector<std::string> warnings;
    const NoiseModel nm = config.build_model(&warnings);

    json fits;
    std::string csv = "experiment,dtheta,depth,mean_survival,std_survival\n";
    std::string summary = "rb\n";
    for (const auto& w : warnings) summary += "warning: " + w + "\n";

    auto emit = [&](const std::string& name, double dtheta, const RbResult& r) {
        for (size_t i = 0; i < r.depths.size(); ++i) {
            csv += fmt::format("{},{},{},{},{}\n", name, num(dtheta), r.depths[i],
                               num(r.mean_survival[i]), num(r.std_survival[i]));
        }
        json fj;
        fj["amplitude"] = r.fit.amplitude;
        fj["alpha"] = r.fit.alpha;
        fj["alpha_stderr"] = r.fit.alpha_stderr();
        fj["asymptote"] = r.fit.asymptote;
        fj["mean_compiled_gates_per_clifford"] = r.mean_compiled_gates;
        fits[name] = std::move(fj);
        return r.fit;
    };

    for (int q = 0; q < 2; ++q) {
        for (int simul = 0; simul <= 1; ++simul) {
            RbConfig rc;
            rc.n = 1;
            rc.qubit = q;
            rc.simultaneous = simul == 1;
            rc.depths = config.rb_depths_1q;
            rc.circuits_per_depth = config.rb_circuits_per_depth;
            rc.shots = config.rb_shots;
            rc.threads = config.threads;
            rc.seed = derive_seed(config.seed,
                                  {20, static_cast<uint64_t>(q), static_cast<uint64_t>(simul)});
            const std::string name =
                fmt::format("rb_1q_q{}_{}", q, simul ? "simultaneous" : "individual");
            const DecayFit fit = emit(name, 0.0, run_rb_experiment(nm, rc));
            summary += fmt::format("{}: alpha = {}, F1 = {}\n", name, num(fit.alpha),
                                   num(fidelity_1q(fit.alpha)));
        }
    }

    for (size_t ti = 0; ti < config.delta_theta.size(); ++ti) {
        const double dtheta = config.delta_theta[ti];
        DecayFit fit_ref, fit_int;
        for (int interleave = 0; interleave <= 1; ++interleave) {
            RbConfig rc;
            rc.n = 2;
            rc.interleave_cz = interleave == 1;
            rc.injected_rz = dtheta;
            rc.injection_target = config.injection_target;
            rc.depths = config.rb_depths_2q;
            rc.circuits_per_depth = config.rb_circuits_per_depth;
            rc.shots = config.rb_shots;
            rc.threads = config.threads;
            rc.seed = derive_seed(config.seed, {21, ti, static_cast<uint64_t>(interleave)});
            const std::string name = fmt::format(
                "rb_2q_{}_dtheta_{}", interleave ? "interleaved" : "reference", num(dtheta));
            const DecayFit fit = emit(name, dtheta, run_rb_experiment(nm, rc));
            if (interleave) fit_int = fit;
            else fit_ref = fit;
        }
        if (fit_int.alpha > fit_ref.alpha)
            summary += fmt::format("warning: interleaved alpha {} exceeds reference {}\n",
                                   num(fit_int.alpha), num(fit_ref.alpha));
        const double f_cz = fidelity_irb(fit_int.alpha, fit_ref.alpha);
        summary += fmt::format("irb dtheta={}: F_CZ = {} +- {}\n", num(dtheta), num(f_cz),
                               num(fidelity_irb_stderr(fit_int, fit_ref)));
        json ij;
        ij["fidelity"] = f_cz;
        ij["stderr"] = fidelity_irb_stderr(fit_int, fit_ref);
        fits[fmt::format("irb_dtheta_{}", num(dtheta))] = std::move(ij);
    }

    write_file(config.out_dir, "rb_curves.csv", csv);
    write_file(config.out_dir, "fits.json", fits.dump(2) + "\n");
    write_file(config.out_dir, "summary.txt", summary);
    return 0;
}

}  // namespace acesim
