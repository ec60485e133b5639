#pragma once

// Exact, slow ground truth: dense Pauli-transfer matrices, brute-force group
// twirls, the Weingarten expansion of Haar integrals, and the benchmark
// states.  Everything here trades speed for being verifiably correct at
// small system size.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "rshadow/channels.hpp"
#include "rshadow/clifford.hpp"
#include "rshadow/pauli.hpp"

namespace rshadow::oracle {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

/// Dense matrix of a (possibly multi-qubit) Pauli, phase included.
MatrixXcd dense_pauli(const PauliString& p);

/// Enumerate the 4^n Pauli bit patterns in base-4 digit order
/// (qubit 0 = most significant digit; digit order I, X, Y, Z).
PauliString pauli_from_index(std::size_t index, std::size_t n);
std::size_t pauli_index(const PauliString& p);

/// PTM entry convention: M(a,b) = tr(sigma_a E(sigma_b)), sigma = P/sqrt(d).
MatrixXd ptm_of_channel(const NoiseSpec& noise);
MatrixXd ptm_of_unitary(const MatrixXcd& u);

/// PTM of the Z-basis dephasing map, diag(1,0,0,1)^{tensor n}.
MatrixXd mz_ptm(std::size_t n);

/// Exact PTM of a noise channel (n <= 4).
MatrixXd exact_ptm(const NoiseSpec& noise);

enum class TwirlGroup {
    Cl2Full,       // the 24 single-qubit Cliffords (n = 1)
    Cl2TensorN2,   // 24 x 24 product group (n = 2)
    Cl4Full,       // all 11520 two-qubit Cliffords (n = 2)
};

/// Exact average of U^dag M_Z Lambda U over the full group.
MatrixXd brute_force_twirl(const NoiseSpec& noise, TwirlGroup group);

/// All two-qubit Clifford tableaus (11520 elements); used by the gated
/// exhaustive checks.
std::vector<StabilizerTableau> enumerate_cl4();

struct WeingartenData {
    double d = 2;
    // S3 in the order (), (12), (13), (23), (123), (132)
    std::array<std::array<int, 3>, 6> permutations;
    Eigen::Matrix<double, 6, 6> gram;        // Q
    Eigen::Matrix<double, 6, 6> weingarten;  // c = pinv(Q)
};

WeingartenData weingarten(double d);

/// Permutation operator W_pi on (C^d)^k:  W |a_1..a_k> = |a_pi(1)..a_pi(k)>.
MatrixXcd permutation_operator(const std::array<int, 3>& pi, int d);

/// Projector onto the k-fold symmetric subspace, built from permutations.
MatrixXcd symmetric_projector(int d, int k);

/// 3-fold Haar twirl of A on (C^d)^3 via the Weingarten expansion.
MatrixXcd haar_threefold_twirl(const MatrixXcd& a, int d);

/// ( tr(P_sym2 A x B),  tr(P_sym3 A x B x B) ) by the closed formulas
///   1/2 (trA trB + tr(AB))
///   1/6 (trA trB^2 + trA tr(B^2) + 2 tr(AB) trB + 2 tr(AB^2)).
std::pair<double, double> symmetric_projector_traces(const MatrixXcd& a, const MatrixXcd& b);

struct GhzState {
    std::vector<PauliString> stabilizers;  // X..X and Z_i Z_{i+1}
    std::vector<GateOp> circuit;           // H(0); CX chain
    VectorXcd dense;
};

GhzState ghz_state(std::size_t n);

struct TfimGroundState {
    VectorXcd state;
    double energy;
};

/// Ground state of H = J sum Z_i Z_{i+1} + h sum X_i (open boundary) by
/// exact diagonalization; Lanczos with a matrix-free apply, dense fallback
/// cross-checked in tests.  n <= 12.
TfimGroundState tfim_ground_state(std::size_t n, double J, double h);

/// tr(O rho) for a dense state.
double exact_expectation_dense(const MatrixXcd& obs, const MatrixXcd& rho);

/// Asymptotic mean of the uncalibrated estimator:
/// <<O| M_ideal^-1 M_twirled |rho>>, computed densely.  This is what the
/// standard post-processing converges to under noise.
double standard_shadow_asymptotic_mean(const MatrixXcd& obs, const MatrixXcd& rho,
                                       const NoiseSpec& noise, GroupTag group);

/// Dense matrix of the twirled measurement channel's PTM,
/// sum_lambda f_lambda Pi_lambda, from the closed-form coefficients.
MatrixXd predicted_twirl_ptm(const NoiseSpec& noise, GroupTag group);

}  // namespace rshadow::oracle
