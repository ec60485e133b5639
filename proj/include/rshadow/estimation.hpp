#pragma once

#include <string>
#include <vector>

#include "rshadow/calibration.hpp"
#include "rshadow/device.hpp"
#include "rshadow/pauli.hpp"

namespace rshadow {

/// An observable to estimate: a real-weighted Pauli sum, or the projector
/// onto a stabilizer state given by n independent commuting generators.
class ObservableSpec {
  public:
    enum class Kind { PauliSum, StabilizerProjector };

    static ObservableSpec pauli_sum(std::string id, std::size_t n,
                                    std::vector<std::pair<double, PauliString>> terms,
                                    std::size_t declared_k = SIZE_MAX);
    static ObservableSpec stabilizer_projector(std::string id, std::size_t n,
                                               std::vector<PauliString> generators);

    Kind kind() const { return kind_; }
    const std::string& id() const { return id_; }
    std::size_t size() const { return n_; }
    std::size_t declared_locality() const { return k_; }
    const std::vector<std::pair<double, PauliString>>& terms() const { return terms_; }
    const std::vector<PauliString>& generators() const { return generators_; }

    /// Projector as a Pauli sum: 2^-n sum over the full stabilizer group.
    std::vector<std::pair<double, PauliString>> to_pauli_terms() const;

    /// Largest support weight over terms.
    std::size_t max_weight() const;

    Eigen::MatrixXcd dense() const;

  private:
    Kind kind_ = Kind::PauliSum;
    std::string id_;
    std::size_t n_ = 0;
    std::size_t k_ = SIZE_MAX;
    std::vector<std::pair<double, PauliString>> terms_;
    std::vector<PauliString> generators_;
};

/// Ideal-channel inverse used by the uncalibrated baseline:
/// (d+1) on the traceless block, or 3^|z| per pattern.
PTMDiagonal standard_shadow_inverse(GroupTag group, std::size_t n,
                                    const std::vector<BitString>& patterns = {});

/// <<O| Minv U^dag |b>>, the one-round reconstruction of tr(O rho).
double single_round_estimate(const ObservableSpec& obs, const PTMDiagonal& minv,
                             const ShadowSample& sample);

struct EstimationOptions {
    std::size_t bootstrap_B = 200;
    unsigned workers = 1;
};

struct ObservableEstimate {
    std::string id;
    std::string inversion;  // label of the inverse map used
    double value = 0.0;
    double sigma = 0.0;
    /// true when the inverse carries a negative coefficient (strong noise);
    /// the sign is propagated, not clamped
    bool negative_coefficient = false;
};

struct EstimationResult {
    std::size_t N = 0, K = 0;
    std::uint64_t R = 0;
    std::uint64_t seed = 0;
    std::vector<ObservableEstimate> estimates;

    const ObservableEstimate& result_for(const std::string& id,
                                         const std::string& inversion) const;
};

/// R = N*K fresh estimation rounds shared by every observable; each labeled
/// inverse map is applied to the same sample stream.
EstimationResult estimate(const DeviceConfig& cfg, const TestState& state,
                          const std::vector<ObservableSpec>& observables,
                          const std::vector<std::pair<std::string, PTMDiagonal>>& inversions,
                          std::size_t N, std::size_t K, const EstimationOptions& opts = {});

/// Single-inversion convenience wrapper (labeled "rshadow").
EstimationResult estimate(const DeviceConfig& cfg, const TestState& state,
                          const std::vector<ObservableSpec>& observables, const PTMDiagonal& minv,
                          std::size_t N, std::size_t K, const EstimationOptions& opts = {});

}  // namespace rshadow
