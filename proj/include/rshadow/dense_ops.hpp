#pragma once

// Small dense-statevector kernels shared by the device and the reference
// oracle.  Basis convention throughout: qubit 0 is the most significant bit,
// so |b_0 b_1 ... b_{n-1}> has index sum b_i 2^(n-1-i).

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "rshadow/clifford.hpp"
#include "rshadow/pauli.hpp"

namespace rshadow::dense {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

inline std::size_t index_of(const BitString& b) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < b.size(); ++i) idx = (idx << 1) | (b.bit(i) ? 1 : 0);
    return idx;
}

inline BitString bitstring_of(std::size_t idx, std::size_t n) {
    BitString b(n);
    for (std::size_t i = 0; i < n; ++i) b.set(i, (idx >> (n - 1 - i)) & 1);
    return b;
}

inline VectorXcd basis_state(const BitString& b) {
    VectorXcd v = VectorXcd::Zero(std::int64_t{1} << b.size());
    v[static_cast<std::int64_t>(index_of(b))] = 1.0;
    return v;
}

inline void apply_1q(VectorXcd& psi, const Eigen::Matrix2cd& u, std::size_t q, std::size_t n) {
    const std::size_t stride = std::size_t{1} << (n - 1 - q);
    const std::size_t dim = std::size_t{1} << n;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a = psi[static_cast<std::int64_t>(i)];
            const cplx b = psi[static_cast<std::int64_t>(i + stride)];
            psi[static_cast<std::int64_t>(i)] = u(0, 0) * a + u(0, 1) * b;
            psi[static_cast<std::int64_t>(i + stride)] = u(1, 0) * a + u(1, 1) * b;
        }
    }
}

inline void apply_2q(VectorXcd& psi, const Eigen::Matrix4cd& u, std::size_t q0, std::size_t q1,
                     std::size_t n) {
    const std::size_t s0 = std::size_t{1} << (n - 1 - q0);
    const std::size_t s1 = std::size_t{1} << (n - 1 - q1);
    const std::size_t dim = std::size_t{1} << n;
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & s0) || (i & s1)) continue;
        const std::size_t i00 = i, i01 = i | s1, i10 = i | s0, i11 = i | s0 | s1;
        const cplx a = psi[static_cast<std::int64_t>(i00)];
        const cplx b = psi[static_cast<std::int64_t>(i01)];
        const cplx c = psi[static_cast<std::int64_t>(i10)];
        const cplx d = psi[static_cast<std::int64_t>(i11)];
        psi[static_cast<std::int64_t>(i00)] = u(0, 0) * a + u(0, 1) * b + u(0, 2) * c + u(0, 3) * d;
        psi[static_cast<std::int64_t>(i01)] = u(1, 0) * a + u(1, 1) * b + u(1, 2) * c + u(1, 3) * d;
        psi[static_cast<std::int64_t>(i10)] = u(2, 0) * a + u(2, 1) * b + u(2, 2) * c + u(2, 3) * d;
        psi[static_cast<std::int64_t>(i11)] = u(3, 0) * a + u(3, 1) * b + u(3, 2) * c + u(3, 3) * d;
    }
}

inline void apply_gate(VectorXcd& psi, const GateOp& g, std::size_t n) {
    const cplx i1(0.0, 1.0);
    const double invs = 1.0 / std::sqrt(2.0);
    switch (g.kind) {
        case GateOp::Kind::H: {
            Eigen::Matrix2cd u;
            u << invs, invs, invs, -invs;
            apply_1q(psi, u, g.q0, n);
            break;
        }
        case GateOp::Kind::S: {
            Eigen::Matrix2cd u;
            u << 1.0, 0.0, 0.0, i1;
            apply_1q(psi, u, g.q0, n);
            break;
        }
        case GateOp::Kind::Sdg: {
            Eigen::Matrix2cd u;
            u << 1.0, 0.0, 0.0, -i1;
            apply_1q(psi, u, g.q0, n);
            break;
        }
        case GateOp::Kind::X: {
            Eigen::Matrix2cd u;
            u << 0.0, 1.0, 1.0, 0.0;
            apply_1q(psi, u, g.q0, n);
            break;
        }
        case GateOp::Kind::Z: {
            Eigen::Matrix2cd u;
            u << 1.0, 0.0, 0.0, -1.0;
            apply_1q(psi, u, g.q0, n);
            break;
        }
        case GateOp::Kind::CX: {
            const std::size_t sc = std::size_t{1} << (n - 1 - g.q0);
            const std::size_t st = std::size_t{1} << (n - 1 - g.q1);
            const std::size_t dim = std::size_t{1} << n;
            for (std::size_t i = 0; i < dim; ++i) {
                if ((i & sc) && !(i & st)) {
                    std::swap(psi[static_cast<std::int64_t>(i)],
                              psi[static_cast<std::int64_t>(i | st)]);
                }
            }
            break;
        }
        case GateOp::Kind::CZ: {
            const std::size_t sa = std::size_t{1} << (n - 1 - g.q0);
            const std::size_t sb = std::size_t{1} << (n - 1 - g.q1);
            const std::size_t dim = std::size_t{1} << n;
            for (std::size_t i = 0; i < dim; ++i) {
                if ((i & sa) && (i & sb)) psi[static_cast<std::int64_t>(i)] = -psi[static_cast<std::int64_t>(i)];
            }
            break;
        }
    }
}

inline void apply_gates(VectorXcd& psi, const std::vector<GateOp>& gs, std::size_t n) {
    for (const auto& g : gs) apply_gate(psi, g, n);
}

/// Apply a Pauli as a gate to the state vector.
inline void apply_pauli(VectorXcd& psi, const PauliString& p) {
    const std::size_t n = p.size();
    for (std::size_t q = 0; q < n; ++q) {
        const bool x = p.x_bit(q), z = p.z_bit(q);
        if (!x && !z) continue;
        Eigen::Matrix2cd u;
        if (x && z)
            u << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
        else if (x)
            u << 0.0, 1.0, 1.0, 0.0;
        else
            u << 1.0, 0.0, 0.0, -1.0;
        apply_1q(psi, u, q, n);
    }
    // overall i^phase is a global phase on the state; irrelevant for outcomes
}

/// Dense unitary of a gate list (small n; test/oracle use).
inline MatrixXcd gates_to_matrix(const std::vector<GateOp>& gs, std::size_t n) {
    const std::int64_t dim = std::int64_t{1} << n;
    MatrixXcd u(dim, dim);
    for (std::int64_t c = 0; c < dim; ++c) {
        VectorXcd col = VectorXcd::Zero(dim);
        col[c] = 1.0;
        for (const auto& g : gs) apply_gate(col, g, n);
        u.col(c) = col;
    }
    return u;
}

}  // namespace rshadow::dense
