#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rshadow/io.hpp"

namespace rshadow::experiments {

/// Parsed experiment manifest.  File keys may be overridden by CLI flags
/// before calling the runners.
struct ExperimentConfig {
    std::string kind;  // ghz-fidelity | ghz-size-sweep | tfim-correlation |
                       // tfim-energy | calibration-only | custom
    std::size_t n = 2;
    std::vector<std::size_t> sizes;      // size sweeps
    GroupTag group = GroupTag::Global;
    nlohmann::json noise;                // constructor name + parameters
    nlohmann::json patterns;             // local-group pattern-set selection
    std::vector<double> noise_levels;    // sweeps substitute the main parameter
    std::size_t n1 = 1000, k1 = 10;      // calibration
    std::size_t n2 = 1000, k2 = 10;      // estimation
    nlohmann::json state_prep;           // optional
    nlohmann::json state;                // estimation input (zero | ghz | tfim)
    std::uint64_t seed = 1;
    double tolerance = 0.1;
    std::size_t bootstrap_B = 200;
    unsigned workers = 1;
    bool paper_scale = false;
    std::string observables_path;        // custom kind
    std::string calibration_path;        // reuse a stored calibration
    std::string sample_log_path;         // optional calibration sample log
    std::string out_path;                // summary / calibration JSON
    std::string csv_path;                // derived from out_path when empty

    static ExperimentConfig from_json(const nlohmann::json& j);
    NoiseSpec noise_spec(std::size_t n_override, std::optional<double> level) const;
    StatePrepSpec prep_spec(std::size_t n_override) const;
};

/// `calibrate` subcommand: run the calibration phase, print the coefficient
/// table, write the calibration JSON to cfg.out_path.
int cmd_calibrate(const ExperimentConfig& cfg);

/// `estimate` subcommand: load a calibration, run the estimation phase on
/// the configured state, write CSV rows.
int cmd_estimate(const ExperimentConfig& cfg);

/// `experiment` subcommand: full pipeline with an oracle-truth comparison
/// and a pass/fail summary.  Returns nonzero when a tolerance check fails.
int cmd_experiment(const ExperimentConfig& cfg);

}  // namespace rshadow::experiments
