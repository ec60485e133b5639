#include "rshadow/oracle.hpp"

#include <cmath>
#include <numeric>

#include "rshadow/dense_ops.hpp"
#include "rshadow/rng.hpp"

namespace rshadow::oracle {

namespace {

using cplx = std::complex<double>;

Eigen::Matrix2cd pauli_1q(int letter) {
    const cplx i1(0.0, 1.0);
    Eigen::Matrix2cd m;
    switch (letter) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, -i1, i1, 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

int letter_of(bool x, bool z) { return x ? (z ? 2 : 1) : (z ? 3 : 0); }

}  // namespace

MatrixXcd dense_pauli(const PauliString& p) {
    MatrixXcd m = MatrixXcd::Identity(1, 1);
    for (std::size_t q = 0; q < p.size(); ++q)
        m = kron(m, pauli_1q(letter_of(p.x_bit(q), p.z_bit(q))));
    const cplx i1(0.0, 1.0);
    cplx phase = 1.0;
    for (int k = 0; k < p.phase_exponent(); ++k) phase *= i1;
    return phase * m;
}

PauliString pauli_from_index(std::size_t index, std::size_t n) {
    PauliString p(n);
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t digit = (index >> (2 * (n - 1 - q))) & 3;
        p.set_xz(q, digit == 1 || digit == 2, digit == 2 || digit == 3);
    }
    return p;
}

std::size_t pauli_index(const PauliString& p) {
    std::size_t idx = 0;
    for (std::size_t q = 0; q < p.size(); ++q)
        idx = (idx << 2) | static_cast<std::size_t>(letter_of(p.x_bit(q), p.z_bit(q)));
    return idx;
}

MatrixXd ptm_of_channel(const NoiseSpec& noise) {
    const std::size_t n = noise.size();
    const std::size_t dim4 = std::size_t{1} << (2 * n);
    const double d = std::ldexp(1.0, static_cast<int>(n));
    MatrixXd m(static_cast<Eigen::Index>(dim4), static_cast<Eigen::Index>(dim4));
    for (std::size_t b = 0; b < dim4; ++b) {
        const MatrixXcd out = noise.apply_dense(dense_pauli(pauli_from_index(b, n)) / std::sqrt(d));
        for (std::size_t a = 0; a < dim4; ++a) {
            const MatrixXcd pa = dense_pauli(pauli_from_index(a, n)) / std::sqrt(d);
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                (pa.adjoint() * out).trace().real();
        }
    }
    return m;
}

MatrixXd ptm_of_unitary(const MatrixXcd& u) {
    const auto dim = static_cast<std::size_t>(u.rows());
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    const std::size_t dim4 = dim * dim;
    const double d = static_cast<double>(dim);
    MatrixXd m(static_cast<Eigen::Index>(dim4), static_cast<Eigen::Index>(dim4));
    for (std::size_t b = 0; b < dim4; ++b) {
        const MatrixXcd out = u * dense_pauli(pauli_from_index(b, n)) * u.adjoint() / std::sqrt(d);
        for (std::size_t a = 0; a < dim4; ++a) {
            const MatrixXcd pa = dense_pauli(pauli_from_index(a, n)) / std::sqrt(d);
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                (pa.adjoint() * out).trace().real();
        }
    }
    return m;
}

MatrixXd mz_ptm(std::size_t n) {
    Eigen::Matrix<double, 4, 4> one = Eigen::Matrix<double, 4, 4>::Zero();
    one(0, 0) = one(3, 3) = 1.0;
    MatrixXd m = MatrixXd::Identity(1, 1);
    for (std::size_t q = 0; q < n; ++q) {
        MatrixXd next(m.rows() * 4, m.cols() * 4);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) next.block(i * 4, j * 4, 4, 4) = m(i, j) * one;
        m = next;
    }
    return m;
}

MatrixXd exact_ptm(const NoiseSpec& noise) {
    if (noise.size() > 4) throw ValidationError("exact_ptm limited to n <= 4");
    return ptm_of_channel(noise);
}

namespace {

/// PTM of a Clifford given as a tableau: a signed permutation of the Pauli
/// basis, assembled column by column from the conjugation action.
MatrixXd ptm_of_tableau(const StabilizerTableau& t) {
    const std::size_t n = t.size();
    const std::size_t dim4 = std::size_t{1} << (2 * n);
    MatrixXd m = MatrixXd::Zero(static_cast<Eigen::Index>(dim4), static_cast<Eigen::Index>(dim4));
    for (std::size_t a = 0; a < dim4; ++a) {
        const PauliString img = t.conjugate(pauli_from_index(a, n));
        PauliString bits = img;
        bits.set_phase_exponent(0);
        m(static_cast<Eigen::Index>(pauli_index(bits)), static_cast<Eigen::Index>(a)) =
            img.hermitian_sign();
    }
    return m;
}

}  // namespace

std::vector<StabilizerTableau> enumerate_cl4() {
    std::vector<StabilizerTableau> out;
    out.reserve(11520);
    auto make_pauli = [](unsigned bits) {
        PauliString p(2);
        p.set_xz(0, bits & 1, bits & 4);
        p.set_xz(1, bits & 2, bits & 8);
        return p;
    };
    auto odd = [](const PauliString& a, const PauliString& b) {
        return (symplectic_product(a, b) & 1) != 0;
    };
    for (unsigned x1 = 1; x1 < 16; ++x1) {
        const PauliString px1 = make_pauli(x1);
        for (unsigned z1 = 1; z1 < 16; ++z1) {
            const PauliString pz1 = make_pauli(z1);
            if (!odd(px1, pz1)) continue;
            for (unsigned x2 = 1; x2 < 16; ++x2) {
                const PauliString px2 = make_pauli(x2);
                if (odd(px2, px1) || odd(px2, pz1)) continue;
                for (unsigned z2 = 1; z2 < 16; ++z2) {
                    const PauliString pz2 = make_pauli(z2);
                    if (odd(pz2, px1) || odd(pz2, pz1) || !odd(px2, pz2)) continue;
                    for (unsigned signs = 0; signs < 16; ++signs) {
                        PauliString d0 = px1, d1 = px2, s0 = pz1, s1 = pz2;
                        d0.set_phase_exponent((signs & 1) ? 2 : 0);
                        d1.set_phase_exponent((signs & 2) ? 2 : 0);
                        s0.set_phase_exponent((signs & 4) ? 2 : 0);
                        s1.set_phase_exponent((signs & 8) ? 2 : 0);
                        StabilizerTableau t = StabilizerTableau::from_string(
                            d0.to_label() + "," + d1.to_label() + ";" + s0.to_label() + "," +
                            s1.to_label());
                        out.push_back(std::move(t));
                    }
                }
            }
        }
    }
    return out;
}

MatrixXd brute_force_twirl(const NoiseSpec& noise, TwirlGroup group) {
    const std::size_t n = noise.size();
    const MatrixXd core = mz_ptm(n) * ptm_of_channel(noise);
    MatrixXd acc = MatrixXd::Zero(core.rows(), core.cols());
    std::size_t count = 0;

    auto add_ptm = [&](const MatrixXd& u) {
        acc += u.transpose() * core * u;
        ++count;
    };

    switch (group) {
        case TwirlGroup::Cl2Full: {
            if (n != 1) throw ValidationError("Cl2Full twirl needs n = 1");
            for (const auto& e : cl1_table()) {
                MatrixXcd u(2, 2);
                u << e.unitary[0][0], e.unitary[0][1], e.unitary[1][0], e.unitary[1][1];
                add_ptm(ptm_of_unitary(u));
            }
            break;
        }
        case TwirlGroup::Cl2TensorN2: {
            if (n != 2) throw ValidationError("Cl2TensorN2 twirl needs n = 2");
            std::vector<MatrixXd> ptms;
            for (const auto& e : cl1_table()) {
                MatrixXcd u(2, 2);
                u << e.unitary[0][0], e.unitary[0][1], e.unitary[1][0], e.unitary[1][1];
                ptms.push_back(ptm_of_unitary(u));
            }
            for (const auto& a : ptms) {
                for (const auto& b : ptms) {
                    MatrixXd u(16, 16);
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j) u.block(i * 4, j * 4, 4, 4) = a(i, j) * b;
                    add_ptm(u);
                }
            }
            break;
        }
        case TwirlGroup::Cl4Full: {
            if (n != 2) throw ValidationError("Cl4Full twirl needs n = 2");
            for (const auto& t : enumerate_cl4()) add_ptm(ptm_of_tableau(t));
            break;
        }
    }
    return acc / static_cast<double>(count);
}

namespace {

std::array<int, 3> compose_perm(const std::array<int, 3>& pi, const std::array<int, 3>& sigma) {
    // (pi . sigma)(i) = pi(sigma(i))
    return {pi[sigma[0]], pi[sigma[1]], pi[sigma[2]]};
}

int cycle_count(const std::array<int, 3>& p) {
    std::array<bool, 3> seen{false, false, false};
    int cycles = 0;
    for (int i = 0; i < 3; ++i) {
        if (seen[i]) continue;
        ++cycles;
        int j = i;
        while (!seen[j]) {
            seen[j] = true;
            j = p[j];
        }
    }
    return cycles;
}

}  // namespace

WeingartenData weingarten(double d) {
    WeingartenData w;
    w.d = d;
    w.permutations = {{{0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}}};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            w.gram(i, j) =
                std::pow(d, cycle_count(compose_perm(w.permutations[static_cast<std::size_t>(i)],
                                                     w.permutations[static_cast<std::size_t>(j)])));
    w.weingarten = w.gram.completeOrthogonalDecomposition().pseudoInverse();
    return w;
}

MatrixXcd permutation_operator(const std::array<int, 3>& pi, int d) {
    const Eigen::Index dim = static_cast<Eigen::Index>(std::pow(d, 3));
    MatrixXcd w = MatrixXcd::Zero(dim, dim);
    for (int a0 = 0; a0 < d; ++a0) {
        for (int a1 = 0; a1 < d; ++a1) {
            for (int a2 = 0; a2 < d; ++a2) {
                const std::array<int, 3> a{a0, a1, a2};
                // W |a_1 a_2 a_3> = |a_pi(1) a_pi(2) a_pi(3)>
                const Eigen::Index row = (a[static_cast<std::size_t>(pi[0])] * d +
                                          a[static_cast<std::size_t>(pi[1])]) *
                                             d +
                                         a[static_cast<std::size_t>(pi[2])];
                const Eigen::Index col = (a0 * d + a1) * d + a2;
                w(row, col) = 1.0;
            }
        }
    }
    return w;
}

MatrixXcd symmetric_projector(int d, int k) {
    if (k == 2) {
        const Eigen::Index dim = d * d;
        MatrixXcd swap = MatrixXcd::Zero(dim, dim);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) swap(b * d + a, a * d + b) = 1.0;
        return 0.5 * (MatrixXcd::Identity(dim, dim) + swap);
    }
    if (k == 3) {
        const WeingartenData w = weingarten(d);
        const Eigen::Index dim = static_cast<Eigen::Index>(std::pow(d, 3));
        MatrixXcd acc = MatrixXcd::Zero(dim, dim);
        for (const auto& pi : w.permutations) acc += permutation_operator(pi, d);
        return acc / 6.0;
    }
    throw ValidationError("symmetric projector implemented for k = 2, 3");
}

MatrixXcd haar_threefold_twirl(const MatrixXcd& a, int d) {
    const Eigen::Index dim = static_cast<Eigen::Index>(std::pow(d, 3));
    if (a.rows() != dim || a.cols() != dim)
        throw DimensionError("haar_threefold_twirl: operand must act on (C^d)^3");
    const WeingartenData w = weingarten(d);
    std::array<MatrixXcd, 6> ws;
    for (std::size_t i = 0; i < 6; ++i) ws[i] = permutation_operator(w.permutations[i], d);
    MatrixXcd out = MatrixXcd::Zero(dim, dim);
    for (std::size_t p = 0; p < 6; ++p) {
        for (std::size_t s = 0; s < 6; ++s) {
            const cplx tr = (ws[s] * a).trace();
            out += w.weingarten(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(s)) * tr *
                   ws[p];
        }
    }
    return out;
}

std::pair<double, double> symmetric_projector_traces(const MatrixXcd& a, const MatrixXcd& b) {
    const cplx tra = a.trace(), trb = b.trace();
    const cplx trab = (a * b).trace();
    const cplx trb2 = (b * b).trace();
    const cplx trab2 = (a * b * b).trace();
    const cplx two = 0.5 * (tra * trb + trab);
    const cplx three =
        (tra * trb * trb + tra * trb2 + 2.0 * trab * trb + 2.0 * trab2) / 6.0;
    return {two.real(), three.real()};
}

GhzState ghz_state(std::size_t n) {
    GhzState g;
    PauliString all_x(n);
    for (std::size_t q = 0; q < n; ++q) all_x.set_xz(q, true, false);
    g.stabilizers.push_back(all_x);
    for (std::size_t q = 0; q + 1 < n; ++q) {
        PauliString zz(n);
        zz.set_xz(q, false, true);
        zz.set_xz(q + 1, false, true);
        g.stabilizers.push_back(zz);
    }
    g.circuit.push_back(GateOp::h(0));
    for (std::size_t q = 0; q + 1 < n; ++q)
        g.circuit.push_back(GateOp::cx(static_cast<std::uint32_t>(q),
                                       static_cast<std::uint32_t>(q + 1)));
    const Eigen::Index dim = Eigen::Index{1} << n;
    g.dense = VectorXcd::Zero(dim);
    g.dense[0] = g.dense[dim - 1] = 1.0 / std::sqrt(2.0);
    return g;
}

namespace {

Eigen::VectorXd tfim_apply(const Eigen::VectorXd& v, std::size_t n, double J, double h) {
    const std::size_t dim = std::size_t{1} << n;
    Eigen::VectorXd out(static_cast<Eigen::Index>(dim));
    for (std::size_t s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const int zi = ((s >> (n - 1 - i)) & 1) ? -1 : 1;
            const int zj = ((s >> (n - 2 - i)) & 1) ? -1 : 1;
            diag += J * zi * zj;
        }
        double acc = diag * v[static_cast<Eigen::Index>(s)];
        for (std::size_t i = 0; i < n; ++i)
            acc += h * v[static_cast<Eigen::Index>(s ^ (std::size_t{1} << (n - 1 - i)))];
        out[static_cast<Eigen::Index>(s)] = acc;
    }
    return out;
}

}  // namespace

TfimGroundState tfim_ground_state(std::size_t n, double J, double h) {
    if (n < 2 || n > 12) throw ValidationError("tfim_ground_state: n must be in [2, 12]");
    const Eigen::Index dim = Eigen::Index{1} << n;

    // Lanczos with full reorthogonalization on the matrix-free apply.
    const int max_iter = std::min<int>(static_cast<int>(dim), 300);
    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;
    RngStream rng = RngStream::derive(20210331, "tfim_lanczos", n);
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.uniform() - 0.5;
    v.normalize();
    basis.push_back(v);

    double ground = 0.0;
    Eigen::VectorXd tri_ground;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd w = tfim_apply(basis.back(), n, J, h);
        if (it > 0) w -= beta.back() * basis[basis.size() - 2];
        const double a = basis.back().dot(w);
        alpha.push_back(a);
        w -= a * basis.back();
        for (const auto& b : basis) w -= b.dot(w) * b;  // full reorthogonalization
        const double nb = w.norm();

        const int k = static_cast<int>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            tri(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        ground = es.eigenvalues()[0];
        tri_ground = es.eigenvectors().col(0);
        const double residual = nb * std::abs(tri_ground[k - 1]);
        if (nb < 1e-12 || residual < 1e-11 || k == static_cast<int>(dim)) break;
        beta.push_back(nb);
        basis.push_back(w / nb);
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < static_cast<std::size_t>(tri_ground.size()); ++i)
        x += tri_ground[static_cast<Eigen::Index>(i)] * basis[i];
    x.normalize();

    TfimGroundState g;
    g.state = x.cast<cplx>();
    g.energy = ground;
    return g;
}

double exact_expectation_dense(const MatrixXcd& obs, const MatrixXcd& rho) {
    if (obs.rows() != rho.rows()) throw DimensionError("exact_expectation_dense");
    return (obs * rho).trace().real();
}

MatrixXd predicted_twirl_ptm(const NoiseSpec& noise, GroupTag group) {
    const std::size_t n = noise.size();
    const std::size_t dim4 = std::size_t{1} << (2 * n);
    Eigen::VectorXd diag(static_cast<Eigen::Index>(dim4));
    if (group == GroupTag::Global) {
        const double f = expected_f_global(noise);
        diag.setConstant(f);
        diag[0] = 1.0;
    } else {
        for (std::size_t a = 0; a < dim4; ++a) {
            const BitString z = pauli_from_index(a, n).support_pattern();
            diag[static_cast<Eigen::Index>(a)] = z.any() ? expected_f_local(noise, z) : 1.0;
        }
    }
    return diag.asDiagonal();
}

double standard_shadow_asymptotic_mean(const MatrixXcd& obs, const MatrixXcd& rho,
                                       const NoiseSpec& noise, GroupTag group) {
    const std::size_t n = noise.size();
    if (n > 4) throw ValidationError("standard_shadow_asymptotic_mean limited to n <= 4");
    const std::size_t dim4 = std::size_t{1} << (2 * n);
    const double d = std::ldexp(1.0, static_cast<int>(n));
    double acc = 0.0;
    for (std::size_t a = 0; a < dim4; ++a) {
        const PauliString pa = pauli_from_index(a, n);
        const MatrixXcd mp = dense_pauli(pa);
        const double o_comp = (mp * obs).trace().real() / d;
        const double rho_comp = (mp * rho).trace().real();
        double kappa = 1.0;
        if (a != 0) {
            const BitString z = pa.support_pattern();
            if (group == GroupTag::Global) {
                kappa = expected_f_global(noise) * (d + 1.0);
            } else {
                kappa = expected_f_local(noise, z) *
                        std::pow(3.0, static_cast<double>(z.weight()));
            }
        }
        acc += kappa * o_comp * rho_comp;
    }
    return acc;
}

}  // namespace rshadow::oracle
