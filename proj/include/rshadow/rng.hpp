#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace rshadow {

/// Counter-based random stream.  Every stream is derived from
/// (master_seed, purpose, counter), so round r of phase "calibration" draws
/// the same values no matter which worker executes it, and serial and
/// sharded runs produce identical sample sets.
///
/// The generator is xoshiro256** seeded through splitmix64; all sampling
/// helpers are implemented from raw 64-bit draws so results are
/// bit-reproducible across platforms.
class RngStream {
  public:
    static RngStream derive(std::uint64_t master_seed, std::string_view purpose,
                            std::uint64_t counter);

    /// Stream used for one-off needs keyed by the master seed alone.
    static RngStream root(std::uint64_t master_seed) { return derive(master_seed, "root", 0); }

    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53 random bits.
    double uniform();

    /// Uniform integer in [0, bound); unbiased (rejection on the top range).
    std::uint64_t below(std::uint64_t bound);

    bool bit() { return (next_u64() >> 63) != 0; }

    /// Standard normal via Box-Muller (two uniforms per call, no cached spare).
    double gaussian();

  private:
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace rshadow
