#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rshadow/channels.hpp"
#include "rshadow/clifford.hpp"
#include "rshadow/pauli.hpp"
#include "rshadow/rng.hpp"

namespace rshadow {

enum class Backend { Dense, StabilizerStochastic };

std::string to_string(Backend b);
Backend backend_from_string(const std::string& s);

struct DeviceConfig {
    std::size_t n = 1;
    NoiseSpec noise = NoiseSpec::identity(1);
    StatePrepSpec state_prep = StatePrepSpec::ideal();
    Backend backend = Backend::Dense;
    std::uint64_t master_seed = 0;
};

/// One round's record: the sampled twirling element and the measured bits.
struct ShadowSample {
    std::uint64_t round = 0;
    CliffordElement clifford;
    BitString outcome;
};

/// Input state for estimation rounds.  Stabilizer-circuit states run on
/// either backend; dense states require the dense backend.
class TestState {
  public:
    static TestState zero(std::size_t n);
    static TestState ghz(std::size_t n);
    static TestState stabilizer_circuit(std::size_t n, std::vector<GateOp> gates);
    static TestState dense_vector(Eigen::VectorXcd psi);
    static TestState dense_density(Eigen::MatrixXcd rho);

    std::size_t size() const { return n_; }
    bool is_stabilizer() const { return kind_ == Kind::Stabilizer; }
    bool is_pure_dense() const { return kind_ == Kind::DenseVector; }
    bool is_density() const { return kind_ == Kind::DenseDensity; }

    const std::vector<GateOp>& circuit() const { return gates_; }
    const Eigen::VectorXcd& vector() const { return psi_; }
    const Eigen::MatrixXcd& density() const { return rho_; }

    /// Dense vector form (builds the circuit state on demand).
    Eigen::VectorXcd to_dense_vector() const;

  private:
    enum class Kind { Stabilizer, DenseVector, DenseDensity };
    Kind kind_ = Kind::Stabilizer;
    std::size_t n_ = 0;
    std::vector<GateOp> gates_;
    Eigen::VectorXcd psi_;
    Eigen::MatrixXcd rho_;
};

/// Throws if the backend cannot realize the configuration.
void validate_device(const DeviceConfig& cfg);
void validate_device(const DeviceConfig& cfg, const TestState& state);

/// One calibration round: prepare |0..0> (or the SP-noisy version), apply a
/// fresh uniform element of the group then the noise channel, measure.
/// Deterministic in (master_seed, r): the round stream is derived from the
/// "calibration" purpose tag.
ShadowSample run_calibration_round(const DeviceConfig& cfg, GroupTag group, std::uint64_t r);

/// One estimation round on the given test state; the "estimation" purpose
/// tag keeps its stream disjoint from calibration.  Test states are prepared
/// exactly (state-preparation noise applies to calibration only).
ShadowSample run_estimation_round(const DeviceConfig& cfg, const TestState& state, GroupTag group,
                                  std::uint64_t r);

}  // namespace rshadow
