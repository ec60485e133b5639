#include "rshadow/calibration.hpp"

#include <cmath>
#include <ostream>

#include "rshadow/parallel.hpp"

namespace rshadow {

double noise_est_global(const ShadowSample& sample) {
    const auto* tab = std::get_if<StabilizerTableau>(&sample.clifford);
    if (!tab) throw ValidationError("global estimator needs a global-group sample");
    const double d = std::ldexp(1.0, static_cast<int>(tab->size()));
    const double fhat = tab->amplitude_probability(sample.outcome);
    return (d * fhat - 1.0) / (d - 1.0);
}

std::vector<int> local_round_factors(const ShadowSample& sample) {
    const auto* word = std::get_if<LocalCliffordWord>(&sample.clifford);
    if (!word) throw ValidationError("local estimator needs a local-group sample");
    const std::size_t n = word->size();
    std::vector<int> factors(n, 0);
    const auto& table = cl1_table();
    for (std::size_t q = 0; q < n; ++q) {
        // image of Z under the qubit's Clifford: slot (x=0,z=1) -> index 2
        const auto& a = table[word->index(q)].action[2];
        if (a.x) {
            factors[q] = 0;  // X or Y image has no diagonal part
        } else {
            const int sign = (a.phase == 2) ? -1 : 1;
            factors[q] = sample.outcome.bit(q) ? -sign : sign;
        }
    }
    return factors;
}

double noise_est_local(const BitString& z, const ShadowSample& sample) {
    const auto factors = local_round_factors(sample);
    if (z.size() != factors.size()) throw DimensionError("noise_est_local");
    int prod = 1;
    for (std::size_t q = 0; q < factors.size(); ++q)
        if (z.bit(q)) prod *= factors[q];
    return static_cast<double>(prod);
}

std::vector<double> estimate_all_patterns(const ShadowSample& sample,
                                          const std::vector<BitString>& z_set) {
    const auto factors = local_round_factors(sample);
    std::vector<double> out;
    out.reserve(z_set.size());
    for (const auto& z : z_set) {
        int prod = 1;
        for (std::size_t q = 0; q < factors.size(); ++q)
            if (z.bit(q)) prod *= factors[q];
        out.push_back(static_cast<double>(prod));
    }
    return out;
}

std::vector<BitString> patterns_up_to_weight(std::size_t n, std::size_t k) {
    std::vector<BitString> out;
    std::vector<std::size_t> sites;
    auto rec = [&](auto&& self, std::size_t start, std::size_t remaining) -> void {
        if (remaining == 0) {
            BitString z(n);
            for (auto s : sites) z.set(s, true);
            out.push_back(z);
            return;
        }
        for (std::size_t s = start; s < n; ++s) {
            sites.push_back(s);
            self(self, s + 1, remaining - 1);
            sites.pop_back();
        }
    };
    for (std::size_t w = 1; w <= k && w <= n; ++w) rec(rec, 0, w);
    return out;
}

std::vector<BitString> nearest_neighbor_patterns(std::size_t n) {
    std::vector<BitString> out;
    for (std::size_t q = 0; q < n; ++q) {
        BitString z(n);
        z.set(q, true);
        out.push_back(z);
    }
    for (std::size_t q = 0; q + 1 < n; ++q) {
        BitString z(n);
        z.set(q, true);
        z.set(q + 1, true);
        out.push_back(z);
    }
    return out;
}

std::vector<BitString> anchored_pair_patterns(std::size_t n, std::size_t anchor) {
    std::vector<BitString> out;
    for (std::size_t q = 0; q < n; ++q) {
        if (q == anchor) continue;
        BitString z(n);
        z.set(anchor, true);
        z.set(q, true);
        out.push_back(z);
    }
    return out;
}

PTMDiagonal CalibrationEstimate::to_diagonal() const {
    if (group == GroupTag::Global) return PTMDiagonal::global(n, f.value);
    std::map<BitString, double> coeffs;
    for (std::size_t i = 0; i < z_set.size(); ++i) coeffs[z_set[i]] = f_z[i].value;
    return PTMDiagonal::local(n, std::move(coeffs));
}

namespace {

CoefficientEstimate aggregate(std::span<const double> values, const MoMConfig& cfg,
                              std::size_t bootstrap_B, RngStream& boot_rng) {
    CoefficientEstimate c;
    c.bin_means = bin_means(values, cfg);
    c.value = median_of_means(values, cfg);
    c.sigma = bootstrap_std(values, cfg, bootstrap_B, boot_rng);
    return c;
}

CalibrationEstimate aggregate_rounds(GroupTag group, std::size_t n, std::size_t N, std::size_t K,
                                     const std::vector<BitString>& z_set,
                                     std::size_t bootstrap_B, std::uint64_t boot_seed,
                                     const std::vector<double>& global_values,
                                     const std::vector<std::vector<double>>& local_values) {
    CalibrationEstimate est;
    est.group = group;
    est.n = n;
    est.N = N;
    est.K = K;
    est.R = static_cast<std::uint64_t>(N) * K;
    est.seed = boot_seed;
    const MoMConfig cfg{N, K};
    if (group == GroupTag::Global) {
        RngStream boot = RngStream::derive(boot_seed, "bootstrap_global", 0);
        est.f = aggregate(global_values, cfg, bootstrap_B, boot);
    } else {
        est.z_set = z_set;
        est.f_z.reserve(z_set.size());
        for (std::size_t i = 0; i < z_set.size(); ++i) {
            RngStream boot = RngStream::derive(boot_seed, "bootstrap_local", i);
            est.f_z.push_back(aggregate(local_values[i], cfg, bootstrap_B, boot));
        }
    }
    return est;
}

}  // namespace

CalibrationEstimate calibrate(const DeviceConfig& cfg, GroupTag group, std::size_t N,
                              std::size_t K, const std::vector<BitString>& z_set,
                              const CalibrationOptions& opts) {
    if (N < 1 || K < 1) throw ValidationError("calibrate needs N, K >= 1");
    validate_device(cfg);
    if (group == GroupTag::Local && z_set.empty())
        throw ValidationError("local calibration needs a pattern set");

    const std::uint64_t R = static_cast<std::uint64_t>(N) * K;
    std::vector<double> global_values;
    std::vector<std::vector<double>> local_values;
    if (group == GroupTag::Global) {
        global_values.resize(R);
    } else {
        local_values.assign(z_set.size(), std::vector<double>(R));
    }
    std::vector<std::string> log_lines;
    if (opts.sample_log) log_lines.resize(R);

    parallel_rounds(R, opts.workers, [&](std::uint64_t r) {
        const ShadowSample sample = run_calibration_round(cfg, group, r);
        if (group == GroupTag::Global) {
            global_values[r] = noise_est_global(sample);
        } else {
            const auto vals = estimate_all_patterns(sample, z_set);
            for (std::size_t i = 0; i < z_set.size(); ++i) local_values[i][r] = vals[i];
        }
        if (opts.sample_log) {
            log_lines[r] = std::to_string(r) + "\t" + clifford_to_string(sample.clifford) + "\t" +
                           sample.outcome.to_string();
        }
    });

    if (opts.sample_log) {
        for (const auto& line : log_lines) (*opts.sample_log) << line << "\n";
    }
    return aggregate_rounds(group, cfg.n, N, K, z_set, opts.bootstrap_B, cfg.master_seed,
                            global_values, local_values);
}

CalibrationEstimate calibrate_from_samples(std::span<const ShadowSample> samples, GroupTag group,
                                           std::size_t n, std::size_t N, std::size_t K,
                                           const std::vector<BitString>& z_set,
                                           std::size_t bootstrap_B, std::uint64_t boot_seed) {
    const std::uint64_t R = static_cast<std::uint64_t>(N) * K;
    if (samples.size() != R) throw DimensionError("sample count != N*K");
    std::vector<double> global_values;
    std::vector<std::vector<double>> local_values;
    if (group == GroupTag::Global) {
        global_values.resize(R);
        for (std::uint64_t r = 0; r < R; ++r) global_values[r] = noise_est_global(samples[r]);
    } else {
        if (z_set.empty()) throw ValidationError("local calibration needs a pattern set");
        local_values.assign(z_set.size(), std::vector<double>(R));
        for (std::uint64_t r = 0; r < R; ++r) {
            const auto vals = estimate_all_patterns(samples[r], z_set);
            for (std::size_t i = 0; i < z_set.size(); ++i) local_values[i][r] = vals[i];
        }
    }
    return aggregate_rounds(group, n, N, K, z_set, bootstrap_B, boot_seed, global_values,
                            local_values);
}

PTMDiagonal build_inverse(const CalibrationEstimate& est, std::optional<double> floor) {
    auto clears = [&](const CoefficientEstimate& c) {
        const double limit = floor.value_or(10.0 * c.sigma);
        return std::abs(c.value) >= limit && c.value != 0.0;
    };
    if (est.group == GroupTag::Global) {
        if (!clears(est.f))
            throw NonInvertibleError("estimated coefficient " + std::to_string(est.f.value) +
                                     " is below the inversion floor");
        return PTMDiagonal::global(est.n, est.f.value).inverse();
    }
    std::map<BitString, double> coeffs;
    for (std::size_t i = 0; i < est.z_set.size(); ++i) {
        if (!clears(est.f_z[i]))
            throw NonInvertibleError("coefficient for pattern " + est.z_set[i].to_string() + " (" +
                                     std::to_string(est.f_z[i].value) +
                                     ") is below the inversion floor");
        coeffs[est.z_set[i]] = est.f_z[i].value;
    }
    return PTMDiagonal::local(est.n, std::move(coeffs)).inverse();
}

SamplePlan plan_samples(double epsilon, double delta, double fidelity, GroupTag group,
                        std::size_t k, std::size_t n) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw ValidationError("plan_samples needs epsilon, delta in (0,1)");
    SamplePlan plan;
    if (group == GroupTag::Global) {
        const double d = std::ldexp(1.0, static_cast<int>(n));
        const double f = (d * fidelity - 1.0) / (d * d - 1.0);
        if (f <= 0.0)
            throw InfeasibleError("assumed fidelity at or below 1/d leaves nothing to invert");
        const double gamma = epsilon * f / (1.0 + epsilon);
        const double var_bound = 2.0 / ((d - 1.0) * (d - 1.0));
        plan.N = static_cast<std::size_t>(std::ceil(34.0 * var_bound / (gamma * gamma)));
        plan.K = static_cast<std::size_t>(std::ceil(2.0 * std::log(2.0 / delta)));
    } else {
        const double gamma_lb = std::pow(2.0 * fidelity - 1.0, static_cast<double>(k));
        if (!(gamma_lb > 0.0))
            throw InfeasibleError("per-qubit fidelity at or below 1/2 is not calibratable");
        if (k == 0) {
            // the empty pattern is the constant 1; only the confidence term
            // survives
            plan.N = 1;
        } else {
            const double ratio = (1.0 + epsilon) / epsilon;
            plan.N = static_cast<std::size_t>(
                std::ceil(34.0 * std::pow(3.0, static_cast<double>(k)) * ratio * ratio /
                          (gamma_lb * gamma_lb)));
        }
        plan.K = static_cast<std::size_t>(std::ceil(
            2.0 * (std::log(2.0 / delta) +
                   static_cast<double>(k) * std::log(static_cast<double>(std::max<std::size_t>(n, 2))))));
    }
    plan.K = std::max<std::size_t>(plan.K, 1);
    plan.R = static_cast<std::uint64_t>(plan.N) * plan.K;
    return plan;
}

}  // namespace rshadow
