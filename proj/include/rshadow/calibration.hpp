#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rshadow/device.hpp"
#include "rshadow/pauli.hpp"
#include "rshadow/stats.hpp"

namespace rshadow {

/// Single-round estimator of the global twirl coefficient:
///   (d |<b|U|0..0>|^2 - 1) / (d - 1).
double noise_est_global(const ShadowSample& sample);

/// Per-qubit factors <b_i| U_i Z U_i^dag |b_i> in {-1, 0, +1}.
std::vector<int> local_round_factors(const ShadowSample& sample);

/// Single-round estimator of f_z: product of the factors on z's support.
double noise_est_local(const BitString& z, const ShadowSample& sample);

/// All requested patterns from one sample, factors computed once per qubit.
/// Output is aligned with z_set.
std::vector<double> estimate_all_patterns(const ShadowSample& sample,
                                          const std::vector<BitString>& z_set);

/// Helpers for building pattern sets.
std::vector<BitString> patterns_up_to_weight(std::size_t n, std::size_t k);
std::vector<BitString> nearest_neighbor_patterns(std::size_t n);  // singles + adjacent pairs
std::vector<BitString> anchored_pair_patterns(std::size_t n, std::size_t anchor);

struct CoefficientEstimate {
    double value = 0.0;
    double sigma = 0.0;
    std::vector<double> bin_means;
};

struct CalibrationEstimate {
    GroupTag group = GroupTag::Global;
    std::size_t n = 0;
    std::size_t N = 0, K = 0;
    std::uint64_t R = 0;
    std::uint64_t seed = 0;
    std::vector<BitString> z_set;             // local tag only
    CoefficientEstimate f;                    // global tag
    std::vector<CoefficientEstimate> f_z;     // aligned with z_set

    PTMDiagonal to_diagonal() const;
};

struct CalibrationOptions {
    std::size_t bootstrap_B = 200;
    unsigned workers = 1;
    /// When set, receives one line per round ("r<TAB>clifford<TAB>bits").
    std::ostream* sample_log = nullptr;
};

/// Run R = N*K calibration rounds on the device and aggregate each
/// coefficient by median of means, with a bootstrap spread per coefficient.
CalibrationEstimate calibrate(const DeviceConfig& cfg, GroupTag group, std::size_t N,
                              std::size_t K, const std::vector<BitString>& z_set = {},
                              const CalibrationOptions& opts = {});

/// Same aggregation over pre-recorded samples (e.g. replayed from a log).
CalibrationEstimate calibrate_from_samples(std::span<const ShadowSample> samples, GroupTag group,
                                           std::size_t n, std::size_t N, std::size_t K,
                                           const std::vector<BitString>& z_set = {},
                                           std::size_t bootstrap_B = 200,
                                           std::uint64_t boot_seed = 0);

/// Reciprocal-coefficient diagonal.  Each coefficient must clear its floor:
/// the override when given, else 10x its bootstrap sigma.
PTMDiagonal build_inverse(const CalibrationEstimate& est,
                          std::optional<double> floor = std::nullopt);

struct SamplePlan {
    std::size_t N = 0, K = 0;
    std::uint64_t R = 0;
};

/// Sample-size planning from the tail bounds: N = ceil(34 Var_bound/gamma^2)
/// with gamma = eps |f| / (1 + eps), K = ceil(2 ln(2/delta)) for the global
/// group and ceil(2 ln(2 n^k / delta)) for the local one.  `fidelity` is the
/// assumed Z-basis fidelity (per qubit for the local group).
SamplePlan plan_samples(double epsilon, double delta, double fidelity, GroupTag group,
                        std::size_t k, std::size_t n);

}  // namespace rshadow
