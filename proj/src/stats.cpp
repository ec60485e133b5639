#include "rshadow/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rshadow/errors.hpp"

namespace rshadow {

namespace {

void check_length(std::size_t len, const MoMConfig& cfg) {
    if (cfg.N < 1 || cfg.K < 1) throw ValidationError("median of means needs N,K >= 1");
    if (len != cfg.N * cfg.K)
        throw DimensionError("sample count " + std::to_string(len) + " != N*K = " +
                             std::to_string(cfg.N * cfg.K));
}

double median_inplace(std::vector<double>& v) {
    const std::size_t k = v.size();
    const std::size_t mid = k / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double hi = v[mid];
    if (k % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> bin_means(std::span<const double> xs, const MoMConfig& cfg) {
    check_length(xs.size(), cfg);
    std::vector<double> means(cfg.K, 0.0);
    for (std::size_t k = 0; k < cfg.K; ++k) {
        double acc = 0.0;
        for (std::size_t i = k * cfg.N; i < (k + 1) * cfg.N; ++i) acc += xs[i];
        means[k] = acc / static_cast<double>(cfg.N);
    }
    return means;
}

double median_of_means(std::span<const double> xs, const MoMConfig& cfg) {
    auto means = bin_means(xs, cfg);
    return median_inplace(means);
}

double bootstrap_std(std::span<const double> xs, const MoMConfig& cfg, std::size_t B,
                     RngStream& rng) {
    check_length(xs.size(), cfg);
    if (B < 2) throw ValidationError("bootstrap needs B >= 2");
    const std::size_t R = xs.size();
    std::vector<double> replicas(B);
    std::vector<double> means(cfg.K);
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t k = 0; k < cfg.K; ++k) {
            double acc = 0.0;
            for (std::size_t i = 0; i < cfg.N; ++i) acc += xs[rng.below(R)];
            means[k] = acc / static_cast<double>(cfg.N);
        }
        std::vector<double> m = means;
        replicas[b] = median_inplace(m);
    }
    double mean = 0.0;
    for (double r : replicas) mean += r;
    mean /= static_cast<double>(B);
    double var = 0.0;
    for (double r : replicas) var += (r - mean) * (r - mean);
    var /= static_cast<double>(B - 1);
    return std::sqrt(var);
}

}  // namespace rshadow
