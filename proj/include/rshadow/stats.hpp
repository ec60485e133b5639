#pragma once

#include <span>
#include <vector>

#include "rshadow/rng.hpp"

namespace rshadow {

struct MoMConfig {
    std::size_t N = 1;  // bin size
    std::size_t K = 1;  // bin count
};

/// Means of the K consecutive length-N blocks.
std::vector<double> bin_means(std::span<const double> xs, const MoMConfig& cfg);

/// Median of the K block means.  Bins are consecutive index ranges
/// [(k-1)N, kN); an even K averages the two central order statistics.
double median_of_means(std::span<const double> xs, const MoMConfig& cfg);

/// Standard deviation of the median-of-means statistic across B resamples
/// of the full data (with replacement).  Deterministic under the stream.
double bootstrap_std(std::span<const double> xs, const MoMConfig& cfg, std::size_t B,
                     RngStream& rng);

}  // namespace rshadow
