#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "rshadow/pauli.hpp"
#include "rshadow/rng.hpp"

namespace rshadow {

using Matrix2cd = Eigen::Matrix2cd;
using Matrix4cd = Eigen::Matrix4cd;
using MatrixXcd = Eigen::MatrixXcd;

/// A CPTP noise channel attached after the twirling unitary.  Stored in one
/// of a few structured forms so the simulated device can realize it round by
/// round without ever materializing 4^n-sized objects; dense Kraus lists are
/// materialized on demand for the exact reference paths.
class NoiseSpec {
  public:
    enum class Kind {
        LocalKraus,          // tensor product of per-qubit Kraus lists
        ClassicalKernel,     // per-qubit outcome transition kernels
        GlobalDepolarizing,  // (1-p) rho + p I/d
        GlobalKraus,         // explicit Kraus list on the full space
        PairUnitaryLayer,    // commuting layer of two-qubit unitaries
    };

    static NoiseSpec identity(std::size_t n);
    static NoiseSpec depolarizing(double p, std::size_t n, bool global_scope);
    static NoiseSpec amplitude_damping(double gamma, std::size_t n);
    static NoiseSpec measurement_bitflip(double p, std::size_t n);
    static NoiseSpec x_rotation(double theta, std::size_t n);
    static NoiseSpec xx_rotation(double theta, std::vector<std::pair<int, int>> pairs,
                                 std::size_t n);
    static NoiseSpec from_local_kraus(std::vector<std::vector<Matrix2cd>> per_qubit);
    static NoiseSpec from_global_kraus(std::vector<MatrixXcd> kraus, std::size_t n);

    Kind kind() const { return kind_; }
    std::size_t size() const { return n_; }

    bool is_pauli_diagonal() const { return pauli_diagonal_; }
    bool is_classical() const { return classical_; }
    bool is_local() const { return local_; }
    bool is_unitary() const { return unitary_; }

    const std::string& name() const { return name_; }
    const std::vector<double>& params() const { return params_; }

    /// Kraus completeness / kernel stochasticity to 1e-12; throws otherwise.
    void validate() const;

    // --- structured access -------------------------------------------------

    const std::vector<std::vector<Matrix2cd>>& local_kraus() const { return local_kraus_; }
    /// Per-qubit kernel, entry (out, in).
    const std::vector<Eigen::Matrix2d>& classical_kernels() const { return kernels_; }
    double global_depolarizing_p() const { return params_.at(0); }
    const std::vector<MatrixXcd>& global_kraus() const { return global_kraus_; }
    const std::vector<std::pair<std::pair<int, int>, Matrix4cd>>& pair_unitaries() const {
        return pair_unitaries_;
    }

    /// Ordered Pauli error branches (weight, Pauli) for Pauli-diagonal kinds;
    /// per-qubit for local kinds.  Shared by every backend so sampled error
    /// realizations consume identical random draws.
    PauliString sample_pauli_error(RngStream& rng) const;

    /// Flip measured bits through the classical kernel (one uniform/qubit).
    BitString apply_classical(const BitString& b, RngStream& rng) const;

    /// Dense Kraus list on the full 2^n space (reference paths; n <= 12).
    std::vector<MatrixXcd> dense_kraus(std::size_t max_n = 12) const;

    /// Dense channel application for the reference paths.
    MatrixXcd apply_dense(const MatrixXcd& rho) const;

  private:
    Kind kind_ = Kind::ClassicalKernel;
    std::size_t n_ = 0;
    bool pauli_diagonal_ = false;
    bool classical_ = false;
    bool local_ = false;
    bool unitary_ = false;
    std::string name_ = "identity";
    std::vector<double> params_;

    std::vector<std::vector<Matrix2cd>> local_kraus_;
    std::vector<Eigen::Matrix2d> kernels_;
    std::vector<MatrixXcd> global_kraus_;
    std::vector<std::pair<std::pair<int, int>, Matrix4cd>> pair_unitaries_;
};

/// Z-basis average fidelity F_Z = 2^-n sum_b <b|L(|b><b|)|b>.
/// Product channels use the per-qubit product form; everything else the
/// exact sum (n <= 12).
double z_basis_fidelity(const NoiseSpec& noise);

/// Diagonal-coherence functional
///   Gamma(z) = 2^-n sum_{x,b} (-1)^{z.(x xor b)} <b|L(|x><x|)|b>.
/// Product channels reduce to prod_{i: z_i=1} (2 F_Z(L_i) - 1).
double gamma_lambda(const NoiseSpec& noise, const BitString& z);

/// Expected global twirl coefficient f = (d F_Z - 1)/(d^2 - 1).
double expected_f_global(const NoiseSpec& noise);

/// Expected local twirl coefficient f_z = 3^-|z| Gamma(z).
double expected_f_local(const NoiseSpec& noise, const BitString& z);

/// Calibration-input preparation: per-qubit single-qubit density matrices,
/// or exact |0...0>.
class StatePrepSpec {
  public:
    static StatePrepSpec ideal() { return StatePrepSpec{}; }

    /// rho_i = (1-xi)|0><0| + xi|1><1| on every qubit.
    static StatePrepSpec per_qubit_flip(double xi, std::size_t n);

    /// Diagonal per-qubit mixture tuned so <0...0|rho|0...0> = 1 - eps.
    static StatePrepSpec global_zero_fidelity(double eps, std::size_t n);

    static StatePrepSpec from_qubit_states(std::vector<Matrix2cd> rho);

    bool is_ideal() const { return rho_.empty(); }
    bool is_diagonal() const;
    std::size_t size() const { return rho_.size(); }
    const std::vector<Matrix2cd>& qubit_states() const { return rho_; }

    /// P(qubit i starts in |1>) for diagonal specs.
    double one_probability(std::size_t i) const;

  private:
    std::vector<Matrix2cd> rho_;
};

}  // namespace rshadow
