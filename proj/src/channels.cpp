#include "rshadow/channels.hpp"

#include <bit>
#include <cmath>

#include "rshadow/dense_ops.hpp"

namespace rshadow {

namespace {

constexpr double kCptpTol = 1e-12;

Matrix2cd pauli_matrix_1q(int letter) {
    const std::complex<double> i1(0.0, 1.0);
    Matrix2cd m;
    switch (letter) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;          // X
        case 2: m << 0, -i1, i1, 0; break;       // Y
        default: m << 1, 0, 0, -1; break;        // Z
    }
    return m;
}

/// If k == c*P for a Pauli letter, return (letter, |c|^2).
std::optional<std::pair<int, double>> pauli_component(const Matrix2cd& k) {
    for (int letter = 0; letter < 4; ++letter) {
        const Matrix2cd p = pauli_matrix_1q(letter);
        const std::complex<double> c = (p.adjoint() * k).trace() / 2.0;
        if ((k - c * p).cwiseAbs().maxCoeff() < 1e-12) {
            return std::make_pair(letter, std::norm(c));
        }
    }
    return std::nullopt;
}

bool is_unitary_list(const std::vector<Matrix2cd>& ks) {
    if (ks.size() != 1) return false;
    return (ks[0].adjoint() * ks[0] - Matrix2cd::Identity()).cwiseAbs().maxCoeff() < kCptpTol;
}

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(what) + " out of [0,1]");
}

}  // namespace

NoiseSpec NoiseSpec::identity(std::size_t n) {
    NoiseSpec s;
    s.kind_ = Kind::ClassicalKernel;
    s.n_ = n;
    s.kernels_.assign(n, Eigen::Matrix2d::Identity());
    s.pauli_diagonal_ = true;
    s.classical_ = true;
    s.local_ = true;
    s.unitary_ = true;
    s.name_ = "identity";
    return s;
}

NoiseSpec NoiseSpec::depolarizing(double p, std::size_t n, bool global_scope) {
    check_probability(p, "depolarizing p");
    NoiseSpec s;
    s.n_ = n;
    s.name_ = "depolarizing";
    s.params_ = {p};
    if (global_scope) {
        s.kind_ = Kind::GlobalDepolarizing;
        s.pauli_diagonal_ = true;
        s.local_ = false;
        s.name_ = "depolarizing_global";
    } else {
        s.kind_ = Kind::LocalKraus;
        std::vector<Matrix2cd> ks;
        ks.push_back(std::sqrt(1.0 - 0.75 * p) * pauli_matrix_1q(0));
        for (int l = 1; l < 4; ++l) ks.push_back(std::sqrt(0.25 * p) * pauli_matrix_1q(l));
        s.local_kraus_.assign(n, ks);
        s.pauli_diagonal_ = true;
        s.local_ = true;
        s.name_ = "depolarizing_local";
    }
    s.unitary_ = (p == 0.0);
    return s;
}

NoiseSpec NoiseSpec::amplitude_damping(double gamma, std::size_t n) {
    check_probability(gamma, "amplitude damping gamma");
    NoiseSpec s;
    s.kind_ = Kind::LocalKraus;
    s.n_ = n;
    s.name_ = "amplitude_damping";
    s.params_ = {gamma};
    Matrix2cd k0, k1;
    k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    k1 << 0, std::sqrt(gamma), 0, 0;
    s.local_kraus_.assign(n, {k0, k1});
    s.local_ = true;
    s.unitary_ = (gamma == 0.0);
    return s;
}

NoiseSpec NoiseSpec::measurement_bitflip(double p, std::size_t n) {
    check_probability(p, "bit-flip p");
    NoiseSpec s;
    s.kind_ = Kind::ClassicalKernel;
    s.n_ = n;
    s.name_ = "measurement_bitflip";
    s.params_ = {p};
    Eigen::Matrix2d k;
    k << 1.0 - p, p, p, 1.0 - p;
    s.kernels_.assign(n, k);
    s.classical_ = true;
    s.pauli_diagonal_ = true;
    s.local_ = true;
    s.unitary_ = (p == 0.0);
    return s;
}

NoiseSpec NoiseSpec::x_rotation(double theta, std::size_t n) {
    NoiseSpec s;
    s.kind_ = Kind::LocalKraus;
    s.n_ = n;
    s.name_ = "x_rotation";
    s.params_ = {theta};
    const std::complex<double> i1(0.0, 1.0);
    Matrix2cd u = std::cos(theta) * pauli_matrix_1q(0) - i1 * std::sin(theta) * pauli_matrix_1q(1);
    s.local_kraus_.assign(n, {u});
    s.local_ = true;
    s.unitary_ = true;
    return s;
}

NoiseSpec NoiseSpec::xx_rotation(double theta, std::vector<std::pair<int, int>> pairs,
                                 std::size_t n) {
    NoiseSpec s;
    s.kind_ = Kind::PairUnitaryLayer;
    s.n_ = n;
    s.name_ = "xx_rotation";
    s.params_ = {theta};
    const std::complex<double> i1(0.0, 1.0);
    Matrix4cd xx = Matrix4cd::Zero();
    xx(0, 3) = xx(1, 2) = xx(2, 1) = xx(3, 0) = 1.0;
    Matrix4cd u = std::cos(theta) * Matrix4cd::Identity() - i1 * std::sin(theta) * xx;
    for (const auto& [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= static_cast<int>(n) || b >= static_cast<int>(n) || a == b)
            throw ValidationError("xx_rotation: invalid qubit pair");
        s.pair_unitaries_.emplace_back(std::make_pair(a, b), u);
    }
    s.unitary_ = true;
    return s;
}

NoiseSpec NoiseSpec::from_local_kraus(std::vector<std::vector<Matrix2cd>> per_qubit) {
    NoiseSpec s;
    s.kind_ = Kind::LocalKraus;
    s.n_ = per_qubit.size();
    s.name_ = "custom_local";
    s.local_kraus_ = std::move(per_qubit);
    s.local_ = true;
    bool pauli = true, unitary = true;
    for (const auto& ks : s.local_kraus_) {
        for (const auto& k : ks)
            if (!pauli_component(k)) pauli = false;
        if (!is_unitary_list(ks)) unitary = false;
    }
    s.pauli_diagonal_ = pauli;
    s.unitary_ = unitary;
    s.validate();
    return s;
}

NoiseSpec NoiseSpec::from_global_kraus(std::vector<MatrixXcd> kraus, std::size_t n) {
    NoiseSpec s;
    s.kind_ = Kind::GlobalKraus;
    s.n_ = n;
    s.name_ = "custom_global";
    s.global_kraus_ = std::move(kraus);
    s.unitary_ = s.global_kraus_.size() == 1 &&
                 (s.global_kraus_[0].adjoint() * s.global_kraus_[0] -
                  MatrixXcd::Identity(s.global_kraus_[0].rows(), s.global_kraus_[0].cols()))
                         .cwiseAbs()
                         .maxCoeff() < kCptpTol;
    s.validate();
    return s;
}

void NoiseSpec::validate() const {
    switch (kind_) {
        case Kind::LocalKraus: {
            if (local_kraus_.size() != n_) throw ValidationError("local Kraus list size != n");
            for (const auto& ks : local_kraus_) {
                Matrix2cd sum = Matrix2cd::Zero();
                for (const auto& k : ks) sum += k.adjoint() * k;
                if ((sum - Matrix2cd::Identity()).cwiseAbs().maxCoeff() > kCptpTol)
                    throw ValidationError("per-qubit Kraus set is not trace preserving");
            }
            break;
        }
        case Kind::ClassicalKernel: {
            for (const auto& k : kernels_) {
                for (int in = 0; in < 2; ++in) {
                    if (k(0, in) < -kCptpTol || k(1, in) < -kCptpTol ||
                        std::abs(k(0, in) + k(1, in) - 1.0) > kCptpTol)
                        throw ValidationError("kernel column is not a probability vector");
                }
            }
            break;
        }
        case Kind::GlobalDepolarizing: check_probability(params_.at(0), "depolarizing p"); break;
        case Kind::GlobalKraus: {
            const auto dim = std::int64_t{1} << n_;
            MatrixXcd sum = MatrixXcd::Zero(dim, dim);
            for (const auto& k : global_kraus_) {
                if (k.rows() != dim || k.cols() != dim)
                    throw ValidationError("global Kraus operator has wrong dimension");
                sum += k.adjoint() * k;
            }
            if ((sum - MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10)
                throw ValidationError("global Kraus set is not trace preserving");
            break;
        }
        case Kind::PairUnitaryLayer: {
            for (const auto& [pq, u] : pair_unitaries_) {
                if ((u.adjoint() * u - Matrix4cd::Identity()).cwiseAbs().maxCoeff() > kCptpTol)
                    throw ValidationError("pair layer element is not unitary");
            }
            break;
        }
    }
}

PauliString NoiseSpec::sample_pauli_error(RngStream& rng) const {
    if (kind_ == Kind::GlobalDepolarizing) {
        const double p = params_[0];
        const double d2 = std::ldexp(1.0, 2 * static_cast<int>(n_));
        const double w_id = 1.0 - p + p / d2;
        if (rng.uniform() < w_id) return PauliString::identity(n_);
        PauliString e(n_);
        do {
            for (std::size_t q = 0; q < n_; ++q) e.set_xz(q, rng.bit(), rng.bit());
        } while (e.is_identity_bits());
        return e;
    }
    if (kind_ == Kind::LocalKraus && pauli_diagonal_) {
        PauliString e(n_);
        for (std::size_t q = 0; q < n_; ++q) {
            const double u = rng.uniform();
            double acc = 0.0;
            int chosen = 0;
            for (const auto& k : local_kraus_[q]) {
                auto pc = pauli_component(k);
                acc += pc->second;
                if (u < acc) {
                    chosen = pc->first;
                    break;
                }
            }
            e.set_xz(q, chosen == 1 || chosen == 2, chosen == 2 || chosen == 3);
        }
        return e;
    }
    return PauliString::identity(n_);
}

BitString NoiseSpec::apply_classical(const BitString& b, RngStream& rng) const {
    if (kind_ != Kind::ClassicalKernel) return b;
    BitString out = b;
    for (std::size_t q = 0; q < n_; ++q) {
        const int in = b.bit(q) ? 1 : 0;
        const double p_one = kernels_[q](1, in);
        out.set(q, rng.uniform() < p_one);
    }
    return out;
}

MatrixXcd NoiseSpec::apply_dense(const MatrixXcd& rho) const {
    const std::size_t dim = static_cast<std::size_t>(rho.rows());
    switch (kind_) {
        case Kind::GlobalDepolarizing: {
            const double p = params_[0];
            return (1.0 - p) * rho +
                   (p * rho.trace() / static_cast<double>(dim)) *
                       MatrixXcd::Identity(rho.rows(), rho.cols());
        }
        case Kind::GlobalKraus: {
            MatrixXcd out = MatrixXcd::Zero(rho.rows(), rho.cols());
            for (const auto& k : global_kraus_) out += k * rho * k.adjoint();
            return out;
        }
        case Kind::PairUnitaryLayer: {
            MatrixXcd out = rho;
            auto apply_cols = [&](const Matrix4cd& u, int a, int b, MatrixXcd& m) {
                for (std::int64_t c = 0; c < m.cols(); ++c) {
                    Eigen::VectorXcd col = m.col(c);
                    dense::apply_2q(col, u, static_cast<std::size_t>(a),
                                    static_cast<std::size_t>(b), n_);
                    m.col(c) = col;
                }
            };
            for (const auto& [pq, u] : pair_unitaries_) {
                apply_cols(u, pq.first, pq.second, out);
                MatrixXcd adj = out.adjoint();
                apply_cols(u, pq.first, pq.second, adj);
                out = adj.adjoint();
            }
            return out;
        }
        case Kind::ClassicalKernel: {
            // Symmetric kernels complete to the Pauli-mixing channel
            // (1-p) rho + p X rho X; asymmetric ones to a reset-style set.
            MatrixXcd out = rho;
            for (std::size_t q = 0; q < n_; ++q) {
                const double a = kernels_[q](1, 0), b = kernels_[q](0, 1);
                std::vector<Matrix2cd> ks;
                if (std::abs(a - b) < 1e-14) {
                    Matrix2cd id = Matrix2cd::Identity(), x;
                    x << 0, 1, 1, 0;
                    ks = {std::sqrt(1.0 - a) * id, std::sqrt(a) * x};
                } else {
                    ks.assign(4, Matrix2cd::Zero());
                    ks[0](1, 0) = std::sqrt(a);
                    ks[1](0, 1) = std::sqrt(b);
                    ks[2](0, 0) = std::sqrt(1.0 - a);
                    ks[3](1, 1) = std::sqrt(1.0 - b);
                }
                out = [&] {
                    MatrixXcd acc = MatrixXcd::Zero(out.rows(), out.cols());
                    for (const auto& k : ks) {
                        MatrixXcd t = out;
                        for (std::int64_t c = 0; c < t.cols(); ++c) {
                            Eigen::VectorXcd col = t.col(c);
                            dense::apply_1q(col, k, q, n_);
                            t.col(c) = col;
                        }
                        MatrixXcd adj = t.adjoint();
                        for (std::int64_t c = 0; c < adj.cols(); ++c) {
                            Eigen::VectorXcd col = adj.col(c);
                            dense::apply_1q(col, k, q, n_);
                            adj.col(c) = col;
                        }
                        acc += adj.adjoint();
                    }
                    return acc;
                }();
            }
            return out;
        }
        case Kind::LocalKraus: {
            MatrixXcd out = rho;
            for (std::size_t q = 0; q < n_; ++q) {
                MatrixXcd acc = MatrixXcd::Zero(out.rows(), out.cols());
                for (const auto& k : local_kraus_[q]) {
                    MatrixXcd t = out;
                    for (std::int64_t c = 0; c < t.cols(); ++c) {
                        Eigen::VectorXcd col = t.col(c);
                        dense::apply_1q(col, k, q, n_);
                        t.col(c) = col;
                    }
                    MatrixXcd adj = t.adjoint();
                    for (std::int64_t c = 0; c < adj.cols(); ++c) {
                        Eigen::VectorXcd col = adj.col(c);
                        dense::apply_1q(col, k, q, n_);
                        adj.col(c) = col;
                    }
                    acc += adj.adjoint();
                }
                out = acc;
            }
            return out;
        }
    }
    throw ValidationError("unreachable noise kind");
}

namespace {

double qubit_z_fidelity_kraus(const std::vector<Matrix2cd>& ks) {
    double f = 0.0;
    for (const auto& k : ks) f += std::norm(k(0, 0)) + std::norm(k(1, 1));
    return 0.5 * f;
}

MatrixXcd pair_layer_matrix(const NoiseSpec& s) {
    const std::size_t n = s.size();
    if (n > 12) throw ValidationError("pair layer too large for dense evaluation");
    const std::int64_t dim = std::int64_t{1} << n;
    MatrixXcd v(dim, dim);
    for (std::int64_t c = 0; c < dim; ++c) {
        Eigen::VectorXcd col = Eigen::VectorXcd::Zero(dim);
        col[c] = 1.0;
        for (const auto& [pq, u] : s.pair_unitaries())
            dense::apply_2q(col, u, static_cast<std::size_t>(pq.first),
                            static_cast<std::size_t>(pq.second), n);
        v.col(c) = col;
    }
    return v;
}

}  // namespace

double z_basis_fidelity(const NoiseSpec& noise) {
    const std::size_t n = noise.size();
    switch (noise.kind()) {
        case NoiseSpec::Kind::LocalKraus: {
            double f = 1.0;
            for (const auto& ks : noise.local_kraus()) f *= qubit_z_fidelity_kraus(ks);
            return f;
        }
        case NoiseSpec::Kind::ClassicalKernel: {
            double f = 1.0;
            for (const auto& k : noise.classical_kernels()) f *= 0.5 * (k(0, 0) + k(1, 1));
            return f;
        }
        case NoiseSpec::Kind::GlobalDepolarizing: {
            const double d = std::ldexp(1.0, static_cast<int>(n));
            const double p = noise.global_depolarizing_p();
            return 1.0 - p + p / d;
        }
        case NoiseSpec::Kind::GlobalKraus: {
            const double d = std::ldexp(1.0, static_cast<int>(n));
            double f = 0.0;
            for (const auto& k : noise.global_kraus())
                for (std::int64_t b = 0; b < k.rows(); ++b) f += std::norm(k(b, b));
            return f / d;
        }
        case NoiseSpec::Kind::PairUnitaryLayer: {
            const MatrixXcd v = pair_layer_matrix(noise);
            double f = 0.0;
            for (std::int64_t b = 0; b < v.rows(); ++b) f += std::norm(v(b, b));
            return f / static_cast<double>(v.rows());
        }
    }
    throw ValidationError("unreachable noise kind");
}

namespace {

double qubit_gamma_factor(const NoiseSpec& noise, std::size_t q) {
    if (noise.kind() == NoiseSpec::Kind::LocalKraus)
        return 2.0 * qubit_z_fidelity_kraus(noise.local_kraus()[q]) - 1.0;
    const auto& k = noise.classical_kernels()[q];
    return k(0, 0) + k(1, 1) - 1.0;
}

double gamma_from_matrix_elements(const Eigen::MatrixXd& mag2_bx, const BitString& z) {
    // mag2_bx(b, x) = <b|Lambda(|x><x|)|b>
    const std::size_t n = z.size();
    const std::size_t dim = std::size_t{1} << n;
    std::size_t zmask = 0;
    for (std::size_t i = 0; i < n; ++i) zmask = (zmask << 1) | (z.bit(i) ? 1 : 0);
    double acc = 0.0;
    for (std::size_t x = 0; x < dim; ++x) {
        for (std::size_t b = 0; b < dim; ++b) {
            const int par = std::popcount(zmask & (x ^ b)) & 1;
            acc += (par ? -1.0 : 1.0) * mag2_bx(static_cast<std::int64_t>(b),
                                                static_cast<std::int64_t>(x));
        }
    }
    return acc / static_cast<double>(dim);
}

}  // namespace

double gamma_lambda(const NoiseSpec& noise, const BitString& z) {
    if (z.size() != noise.size()) throw DimensionError("gamma_lambda");
    if (!z.any()) return 1.0;
    switch (noise.kind()) {
        case NoiseSpec::Kind::LocalKraus:
        case NoiseSpec::Kind::ClassicalKernel: {
            double g = 1.0;
            for (std::size_t q = 0; q < noise.size(); ++q)
                if (z.bit(q)) g *= qubit_gamma_factor(noise, q);
            return g;
        }
        case NoiseSpec::Kind::GlobalDepolarizing: return 1.0 - noise.global_depolarizing_p();
        case NoiseSpec::Kind::GlobalKraus: {
            const std::int64_t dim = std::int64_t{1} << noise.size();
            Eigen::MatrixXd mag2 = Eigen::MatrixXd::Zero(dim, dim);
            for (const auto& k : noise.global_kraus()) mag2 += k.cwiseAbs2().matrix();
            return gamma_from_matrix_elements(mag2, z);
        }
        case NoiseSpec::Kind::PairUnitaryLayer: {
            const MatrixXcd v = pair_layer_matrix(noise);
            const Eigen::MatrixXd mag2 = v.cwiseAbs2();
            return gamma_from_matrix_elements(mag2, z);
        }
    }
    throw ValidationError("unreachable noise kind");
}

double expected_f_global(const NoiseSpec& noise) {
    const double d = std::ldexp(1.0, static_cast<int>(noise.size()));
    return (d * z_basis_fidelity(noise) - 1.0) / (d * d - 1.0);
}

double expected_f_local(const NoiseSpec& noise, const BitString& z) {
    return std::pow(3.0, -static_cast<double>(z.weight())) * gamma_lambda(noise, z);
}

StatePrepSpec StatePrepSpec::per_qubit_flip(double xi, std::size_t n) {
    check_probability(xi, "state-prep xi");
    Matrix2cd r;
    r << 1.0 - xi, 0.0, 0.0, xi;
    StatePrepSpec s;
    s.rho_.assign(n, r);
    return s;
}

StatePrepSpec StatePrepSpec::global_zero_fidelity(double eps, std::size_t n) {
    check_probability(eps, "state-prep eps");
    const double xi = 1.0 - std::pow(1.0 - eps, 1.0 / static_cast<double>(n));
    return per_qubit_flip(xi, n);
}

StatePrepSpec StatePrepSpec::from_qubit_states(std::vector<Matrix2cd> rho) {
    for (const auto& r : rho) {
        if (std::abs(r.trace().real() - 1.0) > 1e-10 || std::abs(r.trace().imag()) > 1e-12)
            throw ValidationError("qubit state must have unit trace");
        Eigen::SelfAdjointEigenSolver<Matrix2cd> es(r);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw ValidationError("qubit state must be positive semidefinite");
    }
    StatePrepSpec s;
    s.rho_ = std::move(rho);
    return s;
}

bool StatePrepSpec::is_diagonal() const {
    for (const auto& r : rho_)
        if (std::abs(r(0, 1)) > 1e-14 || std::abs(r(1, 0)) > 1e-14) return false;
    return true;
}

double StatePrepSpec::one_probability(std::size_t i) const { return rho_[i](1, 1).real(); }

}  // namespace rshadow
