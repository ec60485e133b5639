#include "rshadow/experiments.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "rshadow/dense_ops.hpp"
#include "rshadow/oracle.hpp"

namespace rshadow::experiments {

using nlohmann::json;

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    c.kind = j.value("experiment", "custom");
    c.n = j.value("n", std::size_t{2});
    if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    c.group = group_tag_from_string(j.value("group", "global"));
    if (j.contains("noise")) c.noise = j.at("noise");
    if (j.contains("patterns")) c.patterns = j.at("patterns");
    if (j.contains("noise_levels")) c.noise_levels = j.at("noise_levels").get<std::vector<double>>();
    if (j.contains("calibration")) {
        c.n1 = j.at("calibration").value("N", c.n1);
        c.k1 = j.at("calibration").value("K", c.k1);
    }
    if (j.contains("estimation")) {
        c.n2 = j.at("estimation").value("N", c.n2);
        c.k2 = j.at("estimation").value("K", c.k2);
    }
    if (j.contains("state_prep")) c.state_prep = j.at("state_prep");
    if (j.contains("state")) c.state = j.at("state");
    c.seed = j.value("seed", std::uint64_t{1});
    c.tolerance = j.value("tolerance", 0.1);
    c.bootstrap_B = j.value("bootstrap_B", std::size_t{200});
    c.workers = j.value("workers", 1u);
    c.paper_scale = j.value("paper_scale", false);
    c.observables_path = j.value("observables", "");
    c.calibration_path = j.value("calibration_file", "");
    c.sample_log_path = j.value("sample_log", "");
    c.out_path = j.value("out", "");
    c.csv_path = j.value("csv", "");
    return c;
}

NoiseSpec ExperimentConfig::noise_spec(std::size_t n_override, std::optional<double> level) const {
    if (noise.is_null()) return NoiseSpec::identity(n_override);
    json spec = noise;
    spec["n"] = n_override;
    if (level) {
        const std::string kind = spec.value("kind", "identity");
        if (kind == "depolarizing" || kind == "measurement_bitflip") spec["p"] = *level;
        else if (kind == "amplitude_damping") spec["gamma"] = *level;
        else if (kind == "x_rotation" || kind == "xx_rotation") spec["theta"] = *level;
    }
    if (spec.value("kind", "identity") == "xx_rotation" && !spec.contains("pairs")) {
        json pairs = json::array();
        for (std::size_t q = 0; q + 1 < n_override; ++q)
            pairs.push_back({static_cast<int>(q), static_cast<int>(q + 1)});
        spec["pairs"] = pairs;
    }
    return io::noise_from_json(spec);
}

StatePrepSpec ExperimentConfig::prep_spec(std::size_t n_override) const {
    if (state_prep.is_null()) return StatePrepSpec::ideal();
    json spec = state_prep;
    if (!spec.contains("n")) spec["n"] = n_override;
    return io::state_prep_from_json(spec);
}

namespace {

Backend pick_backend(const NoiseSpec& noise, bool stabilizer_state) {
    if (stabilizer_state && (noise.is_pauli_diagonal() || noise.is_classical()))
        return Backend::StabilizerStochastic;
    return Backend::Dense;
}

DeviceConfig make_device(const ExperimentConfig& cfg, std::size_t n, const NoiseSpec& noise,
                         bool stabilizer_state) {
    DeviceConfig dev;
    dev.n = n;
    dev.noise = noise;
    dev.state_prep = cfg.prep_spec(n);
    dev.backend = pick_backend(noise, stabilizer_state && dev.state_prep.is_ideal());
    dev.master_seed = cfg.seed;
    return dev;
}

std::vector<BitString> pattern_set_from_config(const ExperimentConfig& cfg, std::size_t n) {
    if (!cfg.patterns.is_null()) {
        const json& p = cfg.patterns;
        const std::string kind = p.value("kind", "weight");
        if (kind == "weight") return patterns_up_to_weight(n, p.value("k", std::size_t{2}));
        if (kind == "nearest-neighbor") return nearest_neighbor_patterns(n);
        if (kind == "anchored") return anchored_pair_patterns(n, p.value("anchor", std::size_t{0}));
        if (kind == "list") {
            std::vector<BitString> out;
            for (const auto& s : p.at("z")) out.push_back(BitString::from_string(s));
            return out;
        }
        throw ConfigError("unknown pattern-set kind: " + kind);
    }
    return patterns_up_to_weight(n, 2);
}

TestState make_test_state(const ExperimentConfig& cfg, std::size_t n) {
    const std::string kind = cfg.state.is_null() ? "ghz" : cfg.state.value("kind", "ghz");
    if (kind == "zero") return TestState::zero(n);
    if (kind == "ghz") return TestState::ghz(n);
    if (kind == "tfim") {
        const double J = cfg.state.is_null() ? 1.0 : cfg.state.value("J", 1.0);
        const double h = cfg.state.is_null() ? 1.0 : cfg.state.value("h", 1.0);
        return TestState::dense_vector(oracle::tfim_ground_state(n, J, h).state);
    }
    throw ConfigError("unknown state kind: " + kind);
}

double expectation_on_vector(const std::vector<std::pair<double, PauliString>>& terms,
                             const Eigen::VectorXcd& psi) {
    double acc = 0.0;
    for (const auto& [coeff, p] : terms) {
        Eigen::VectorXcd tmp = psi;
        dense::apply_pauli(tmp, p);
        acc += coeff * psi.dot(tmp).real();
    }
    return acc;
}

/// Asymptotic mean of the uncalibrated estimator for a Pauli-sum observable:
/// identity terms pass through; other terms shrink by f_noisy / f_ideal.
double predicted_standard_mean_terms(const std::vector<std::pair<double, PauliString>>& terms,
                                     const Eigen::VectorXcd& psi, const NoiseSpec& noise,
                                     GroupTag group) {
    const double d = std::ldexp(1.0, static_cast<int>(noise.size()));
    double acc = 0.0;
    for (const auto& [coeff, p] : terms) {
        double kappa = 1.0;
        if (!p.is_identity_bits()) {
            if (group == GroupTag::Global) {
                kappa = expected_f_global(noise) * (d + 1.0);
            } else {
                const BitString z = p.support_pattern();
                kappa = gamma_lambda(noise, z);
            }
        }
        Eigen::VectorXcd tmp = psi;
        dense::apply_pauli(tmp, p);
        acc += coeff * kappa * psi.dot(tmp).real();
    }
    return acc;
}

struct Row {
    std::map<std::string, std::string> cells;
};

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<Row>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open CSV output: " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out << (i ? "," : "");
            auto it = row.cells.find(columns[i]);
            if (it != row.cells.end()) out << it->second;
        }
        out << "\n";
    }
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(10);
    ss << v;
    return ss.str();
}

void print_calibration(const CalibrationEstimate& est) {
    if (est.group == GroupTag::Global) {
        const double noiseless = 1.0 / (std::ldexp(1.0, static_cast<int>(est.n)) + 1.0);
        std::cout << "f_hat = " << est.f.value << "  sigma = " << est.f.sigma
                  << "  (noiseless " << noiseless << ")\n";
        return;
    }
    std::cout << "pattern  f_hat          sigma          noiseless\n";
    for (std::size_t i = 0; i < est.z_set.size(); ++i) {
        const double noiseless =
            std::pow(3.0, -static_cast<double>(est.z_set[i].weight()));
        std::cout << est.z_set[i].to_string() << "  " << est.f_z[i].value << "  "
                  << est.f_z[i].sigma << "  " << noiseless << "\n";
    }
}

CalibrationEstimate run_calibration_phase(const ExperimentConfig& cfg, std::size_t n,
                                          const NoiseSpec& noise,
                                          const std::vector<BitString>& patterns) {
    const DeviceConfig dev = make_device(cfg, n, noise, true);
    CalibrationOptions opts;
    opts.bootstrap_B = cfg.bootstrap_B;
    opts.workers = cfg.workers;
    std::ofstream log_stream;
    if (!cfg.sample_log_path.empty()) {
        log_stream.open(cfg.sample_log_path);
        if (!log_stream) throw ConfigError("cannot open sample log: " + cfg.sample_log_path);
        opts.sample_log = &log_stream;
    }
    const std::size_t scale = cfg.paper_scale ? 10 : 1;
    return calibrate(dev, cfg.group, cfg.n1 * scale, cfg.k1, patterns, opts);
}

struct EstimatePhaseResult {
    EstimationResult result;
    bool inversion_ok = true;
    std::string inversion_error;
};

EstimatePhaseResult run_estimation_phase(const ExperimentConfig& cfg, std::size_t n,
                                         const NoiseSpec& noise, const TestState& state,
                                         const CalibrationEstimate& cal,
                                         const std::vector<ObservableSpec>& observables,
                                         const std::vector<BitString>& patterns) {
    EstimatePhaseResult out;
    std::vector<std::pair<std::string, PTMDiagonal>> inversions;
    try {
        inversions.emplace_back("rshadow", build_inverse(cal));
    } catch (const NonInvertibleError& e) {
        out.inversion_ok = false;
        out.inversion_error = e.what();
        return out;
    }
    inversions.emplace_back("standard", standard_shadow_inverse(cfg.group, n, patterns));
    const DeviceConfig dev = make_device(cfg, n, noise, state.is_stabilizer());
    EstimationOptions opts;
    opts.bootstrap_B = cfg.bootstrap_B;
    opts.workers = cfg.workers;
    const std::size_t scale = cfg.paper_scale ? 10 : 1;
    out.result = estimate(dev, state, observables, inversions, cfg.n2 * scale, cfg.k2, opts);
    return out;
}

int finish(const ExperimentConfig& cfg, json summary, const std::vector<std::string>& columns,
           const std::vector<Row>& rows, bool pass) {
    summary["pass"] = pass;
    std::string csv = cfg.csv_path;
    if (csv.empty() && !cfg.out_path.empty()) {
        csv = cfg.out_path;
        const auto dot = csv.rfind('.');
        if (dot != std::string::npos) csv = csv.substr(0, dot);
        csv += ".csv";
    }
    if (!csv.empty() && !rows.empty()) {
        write_csv(csv, columns, rows);
        summary["csv"] = csv;
    }
    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path);
        if (!out) throw ConfigError("cannot open output: " + cfg.out_path);
        out << summary.dump(2) << "\n";
    }
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
}

}  // namespace

int cmd_calibrate(const ExperimentConfig& cfg) {
    const NoiseSpec noise = cfg.noise_spec(cfg.n, std::nullopt);
    std::vector<BitString> patterns;
    if (cfg.group == GroupTag::Local) patterns = pattern_set_from_config(cfg, cfg.n);
    const CalibrationEstimate est = run_calibration_phase(cfg, cfg.n, noise, patterns);
    print_calibration(est);
    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path);
        if (!out) throw ConfigError("cannot open output: " + cfg.out_path);
        out << io::calibration_to_json(est).dump(2) << "\n";
    }
    // report, but do not fail on, a non-invertible estimate
    try {
        build_inverse(est);
    } catch (const NonInvertibleError& e) {
        std::cout << "warning: " << e.what() << "\n";
    }
    return 0;
}

int cmd_estimate(const ExperimentConfig& cfg) {
    if (cfg.calibration_path.empty() || cfg.observables_path.empty())
        throw ConfigError("estimate needs calibration_file and observables");
    std::ifstream cal_in(cfg.calibration_path);
    if (!cal_in) throw ConfigError("cannot open calibration: " + cfg.calibration_path);
    json cal_json;
    cal_in >> cal_json;
    const CalibrationEstimate cal = io::calibration_from_json(cal_json);
    if (cal.group != cfg.group)
        throw ConfigError("calibration group does not match the configured group");
    std::ifstream obs_in(cfg.observables_path);
    if (!obs_in) throw ConfigError("cannot open observables: " + cfg.observables_path);
    const std::vector<ObservableSpec> observables = io::read_observables(obs_in);

    const NoiseSpec noise = cfg.noise_spec(cfg.n, std::nullopt);
    const TestState state = make_test_state(cfg, cfg.n);
    const auto phase =
        run_estimation_phase(cfg, cfg.n, noise, state, cal, observables, cal.z_set);
    if (!phase.inversion_ok) throw NonInvertibleError(phase.inversion_error);

    std::vector<Row> rows;
    const Eigen::VectorXcd psi = state.to_dense_vector();
    for (const auto& obs : observables) {
        Row row;
        row.cells["observable"] = obs.id();
        const auto& rs = phase.result.result_for(obs.id(), "rshadow");
        const auto& st = phase.result.result_for(obs.id(), "standard");
        row.cells["o_rshadow"] = fmt(rs.value);
        row.cells["sigma_rshadow"] = fmt(rs.sigma);
        row.cells["o_standard"] = fmt(st.value);
        row.cells["sigma_standard"] = fmt(st.sigma);
        row.cells["truth"] = fmt(expectation_on_vector(obs.to_pauli_terms(), psi));
        row.cells["N"] = std::to_string(phase.result.N);
        row.cells["K"] = std::to_string(phase.result.K);
        row.cells["seed"] = std::to_string(cfg.seed);
        rows.push_back(std::move(row));
    }
    json summary;
    summary["experiment"] = "estimate";
    summary["calibration_file"] = cfg.calibration_path;
    summary["calibration_seed"] = cal.seed;
    return finish(cfg, summary,
                  {"observable", "o_rshadow", "sigma_rshadow", "o_standard", "sigma_standard",
                   "truth", "N", "K", "seed"},
                  rows, true);
}

namespace {

struct PointOutcome {
    Row row;
    bool pass = true;
};

/// One (n, noise level) point of a GHZ-fidelity style experiment.
PointOutcome ghz_point(const ExperimentConfig& cfg, std::size_t n, std::optional<double> level) {
    if (cfg.group != GroupTag::Global)
        throw ConfigError(
            "GHZ-fidelity experiments use the global group (projector estimation); "
            "express local-group fidelities through a pauli observable file instead");
    const NoiseSpec noise = cfg.noise_spec(n, level);
    const oracle::GhzState ghz = oracle::ghz_state(n);
    const ObservableSpec fidelity =
        ObservableSpec::stabilizer_projector("ghz_fidelity", n, ghz.stabilizers);

    const CalibrationEstimate cal = run_calibration_phase(cfg, n, noise, {});
    const auto phase = run_estimation_phase(cfg, n, noise, TestState::ghz(n), cal, {fidelity}, {});

    PointOutcome out;
    out.row.cells["n"] = std::to_string(n);
    out.row.cells["level"] = level ? fmt(*level) : "";
    out.row.cells["observable"] = "ghz_fidelity";
    out.row.cells["truth"] = "1";
    out.row.cells["f_hat"] = fmt(cal.f.value);
    out.row.cells["f_sigma"] = fmt(cal.f.sigma);
    if (!phase.inversion_ok) {
        out.row.cells["error"] = phase.inversion_error;
        out.pass = false;
        return out;
    }
    const auto& rs = phase.result.result_for("ghz_fidelity", "rshadow");
    const auto& st = phase.result.result_for("ghz_fidelity", "standard");
    out.row.cells["o_rshadow"] = fmt(rs.value);
    out.row.cells["sigma_rshadow"] = fmt(rs.sigma);
    out.row.cells["o_standard"] = fmt(st.value);
    out.row.cells["sigma_standard"] = fmt(st.sigma);
    if (n <= 4) {
        const Eigen::MatrixXcd proj = ghz.dense * ghz.dense.adjoint();
        out.row.cells["standard_predicted"] =
            fmt(oracle::standard_shadow_asymptotic_mean(proj, proj, noise, cfg.group));
    } else {
        // closed form: a projector onto a pure state shrinks towards 1/d by
        // the coefficient ratio f_noisy/f_ideal
        const double d = std::ldexp(1.0, static_cast<int>(n));
        const double kappa = expected_f_global(noise) * (d + 1.0);
        out.row.cells["standard_predicted"] = fmt(1.0 / d + kappa * (1.0 - 1.0 / d));
    }
    out.pass = std::abs(rs.value - 1.0) <= cfg.tolerance;
    return out;
}

}  // namespace

int cmd_experiment(const ExperimentConfig& cfg) {
    json summary;
    summary["experiment"] = cfg.kind;
    summary["group"] = to_string(cfg.group);
    summary["seed"] = cfg.seed;
    summary["tolerance"] = cfg.tolerance;
    std::vector<Row> rows;
    bool pass = true;

    const std::vector<std::string> ghz_columns = {
        "n",          "level",         "observable",  "truth",
        "o_rshadow",  "sigma_rshadow", "o_standard",  "sigma_standard",
        "f_hat",      "f_sigma",       "standard_predicted", "error"};

    if (cfg.kind == "calibration-only") {
        return cmd_calibrate(cfg);
    }

    if (cfg.kind == "ghz-fidelity") {
        std::vector<std::optional<double>> levels;
        if (cfg.noise_levels.empty()) levels.push_back(std::nullopt);
        for (double l : cfg.noise_levels) levels.push_back(l);
        for (const auto& level : levels) {
            PointOutcome p = ghz_point(cfg, cfg.n, level);
            pass &= p.pass;
            rows.push_back(std::move(p.row));
        }
        return finish(cfg, summary, ghz_columns, rows, pass);
    }

    if (cfg.kind == "ghz-size-sweep") {
        std::vector<std::size_t> sizes = cfg.sizes.empty() ? std::vector<std::size_t>{2, 4, 6}
                                                           : cfg.sizes;
        std::vector<std::optional<double>> levels;
        if (cfg.noise_levels.empty()) levels.push_back(std::nullopt);
        for (double l : cfg.noise_levels) levels.push_back(l);
        for (std::size_t n : sizes) {
            for (const auto& level : levels) {
                PointOutcome p = ghz_point(cfg, n, level);
                pass &= p.pass;
                rows.push_back(std::move(p.row));
            }
        }
        return finish(cfg, summary, ghz_columns, rows, pass);
    }

    if (cfg.kind == "tfim-correlation" || cfg.kind == "tfim-energy") {
        const std::size_t n = cfg.n;
        const NoiseSpec noise = cfg.noise_spec(n, std::nullopt);
        const oracle::TfimGroundState ground = oracle::tfim_ground_state(n, 1.0, 1.0);
        const TestState state = TestState::dense_vector(ground.state);

        std::vector<ObservableSpec> observables;
        std::vector<BitString> patterns;
        if (cfg.kind == "tfim-correlation") {
            patterns = anchored_pair_patterns(n, 0);
            for (std::size_t i = 1; i < n; ++i) {
                PauliString zz(n);
                zz.set_xz(0, false, true);
                zz.set_xz(i, false, true);
                observables.push_back(ObservableSpec::pauli_sum(
                    "z0z" + std::to_string(i), n, {{1.0, zz}}, 2));
            }
        } else {
            patterns = nearest_neighbor_patterns(n);
            std::vector<std::pair<double, PauliString>> energy_terms;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                PauliString zz(n);
                zz.set_xz(i, false, true);
                zz.set_xz(i + 1, false, true);
                energy_terms.emplace_back(1.0, zz);
                observables.push_back(ObservableSpec::pauli_sum(
                    "zz" + std::to_string(i), n, {{1.0, zz}}, 2));
            }
            for (std::size_t i = 0; i < n; ++i) {
                PauliString x(n);
                x.set_xz(i, true, false);
                energy_terms.emplace_back(1.0, x);
                observables.push_back(
                    ObservableSpec::pauli_sum("x" + std::to_string(i), n, {{1.0, x}}, 2));
            }
            observables.push_back(ObservableSpec::pauli_sum("energy", n, energy_terms, 2));
        }

        const CalibrationEstimate cal = run_calibration_phase(cfg, n, noise, patterns);
        const auto phase =
            run_estimation_phase(cfg, n, noise, state, cal, observables, patterns);
        if (!phase.inversion_ok) {
            summary["error"] = phase.inversion_error;
            return finish(cfg, summary, {}, {}, false);
        }
        for (const auto& obs : observables) {
            Row row;
            row.cells["n"] = std::to_string(n);
            row.cells["observable"] = obs.id();
            const double truth = expectation_on_vector(obs.terms(), ground.state);
            const auto& rs = phase.result.result_for(obs.id(), "rshadow");
            const auto& st = phase.result.result_for(obs.id(), "standard");
            row.cells["truth"] = fmt(truth);
            row.cells["o_rshadow"] = fmt(rs.value);
            row.cells["sigma_rshadow"] = fmt(rs.sigma);
            row.cells["o_standard"] = fmt(st.value);
            row.cells["sigma_standard"] = fmt(st.sigma);
            row.cells["standard_predicted"] =
                fmt(predicted_standard_mean_terms(obs.terms(), ground.state, noise, cfg.group));
            const double tol = cfg.tolerance * std::max<double>(1.0, obs.terms().size());
            pass &= std::abs(rs.value - truth) <= tol;
            rows.push_back(std::move(row));
        }
        summary["ground_energy"] = ground.energy;
        return finish(cfg, summary,
                      {"n", "observable", "truth", "o_rshadow", "sigma_rshadow", "o_standard",
                       "sigma_standard", "standard_predicted"},
                      rows, pass);
    }

    if (cfg.kind == "custom") {
        return cmd_estimate(cfg);
    }
    throw ConfigError("unknown experiment kind: " + cfg.kind);
}

}  // namespace rshadow::experiments
