#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "rshadow/dense_ops.hpp"
#include "rshadow/oracle.hpp"

using namespace rshadow;
using namespace rshadow::oracle;

namespace {

Eigen::MatrixXcd random_hermitian(int dim, RngStream& rng) {
    Eigen::MatrixXcd a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = std::complex<double>(rng.gaussian(), rng.gaussian());
    return 0.5 * (a + a.adjoint());
}

Eigen::MatrixXcd cl1_matrix(std::size_t idx) {
    const auto& m = cl1_table()[idx].unitary;
    Eigen::MatrixXcd u(2, 2);
    u << m[0][0], m[0][1], m[1][0], m[1][1];
    return u;
}

Eigen::MatrixXcd kron3(const Eigen::MatrixXcd& u) {
    Eigen::MatrixXcd uu(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) uu.block(i * 2, j * 2, 2, 2) = u(i, j) * u;
    Eigen::MatrixXcd uuu(8, 8);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) uuu.block(i * 4, j * 4, 4, 4) = u(i, j) * uu;
    return uuu;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("M_Z transfer matrix is diag(1,0,0,1) per qubit") {
    const Eigen::MatrixXd m1 = mz_ptm(1);
    Eigen::Vector4d expect(1, 0, 0, 1);
    CHECK((m1 - Eigen::MatrixXd(expect.asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);
    const Eigen::MatrixXd m2 = mz_ptm(2);
    CHECK(m2.diagonal().sum() == doctest::Approx(4.0));
    CHECK(m2.cwiseAbs().sum() == doctest::Approx(4.0));
}

TEST_CASE("channel transfer matrices: identity and single-qubit depolarizing") {
    const Eigen::MatrixXd id = exact_ptm(NoiseSpec::identity(2));
    CHECK((id - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
    const double p = 0.3;
    const Eigen::MatrixXd dep = exact_ptm(NoiseSpec::depolarizing(p, 1, false));
    Eigen::Vector4d expect(1, 1 - p, 1 - p, 1 - p);
    CHECK((dep - Eigen::MatrixXd(expect.asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("twirl over the 24 single-qubit Cliffords: noiseless depolarizes to 1/3") {
    const Eigen::MatrixXd tw = brute_force_twirl(NoiseSpec::identity(1), TwirlGroup::Cl2Full);
    Eigen::Vector4d expect(1.0, 1.0 / 3, 1.0 / 3, 1.0 / 3);
    CHECK((tw - Eigen::MatrixXd(expect.asDiagonal())).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("twirl with bit-flip noise: f = (2(1-p)-1)/3") {
    const double p = 0.2;
    const Eigen::MatrixXd tw =
        brute_force_twirl(NoiseSpec::measurement_bitflip(p, 1), TwirlGroup::Cl2Full);
    const double f = (2.0 * (1.0 - p) - 1.0) / 3.0;
    Eigen::Vector4d expect(1.0, f, f, f);
    CHECK((tw - Eigen::MatrixXd(expect.asDiagonal())).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("product-group twirl at n = 2 equals sum of f_z projectors") {
    const NoiseSpec noise = NoiseSpec::amplitude_damping(0.15, 2);
    const Eigen::MatrixXd tw = brute_force_twirl(noise, TwirlGroup::Cl2TensorN2);
    const Eigen::MatrixXd predicted = predicted_twirl_ptm(noise, GroupTag::Local);
    CHECK((tw - predicted).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gram matrix: symmetric with leading diagonal d^3") {
    for (double d : {2.0, 3.0, 4.0}) {
        const WeingartenData w = weingarten(d);
        CHECK((w.gram - w.gram.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(w.gram(0, 0) == doctest::Approx(d * d * d));
        CHECK(w.gram(0, 1) == doctest::Approx(d * d));
        CHECK(w.gram(0, 4) == doctest::Approx(d));
        CHECK(w.gram(4, 5) == doctest::Approx(d * d * d));
    }
}

TEST_CASE("pseudo-inverse identity Q c Q = Q for d in {2,3,4}") {
    for (double d : {2.0, 3.0, 4.0}) {
        const WeingartenData w = weingarten(d);
        CHECK((w.gram * w.weingarten * w.gram - w.gram).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("d = 2 Weingarten matrix matches the exact 1/144 form") {
    const WeingartenData w = weingarten(2.0);
    Eigen::Matrix<double, 6, 6> expect;
    expect << 17, 1, 1, 1, -7, -7,
              1, 17, -7, -7, 1, 1,
              1, -7, 17, -7, 1, 1,
              1, -7, -7, 17, 1, 1,
              -7, 1, 1, 1, -7, 17,
              -7, 1, 1, 1, 17, -7;
    expect /= 144.0;
    CHECK((w.weingarten - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("d >= 3 Weingarten matrix matches the closed rational form") {
    const double d = 3.0;
    const WeingartenData w = weingarten(d);
    const double denom = d * (d * d - 1.0) * (d * d - 4.0);
    CHECK(w.weingarten(0, 0) == doctest::Approx((d * d - 2.0) / denom).epsilon(1e-10));
    CHECK(w.weingarten(0, 0) == doctest::Approx(7.0 / 120.0).epsilon(1e-10));
    CHECK(w.weingarten(0, 1) == doctest::Approx(-d / denom).epsilon(1e-10));
    CHECK(w.weingarten(0, 4) == doctest::Approx(2.0 / denom).epsilon(1e-10));
}

TEST_CASE("permutation operator traces factor over cycles") {
    RngStream rng = RngStream::derive(50, "oracle_perm", 0);
    const Eigen::MatrixXcd a = random_hermitian(2, rng);
    const Eigen::MatrixXcd b = random_hermitian(2, rng);
    const WeingartenData w = weingarten(2.0);
    Eigen::MatrixXcd abb(8, 8);
    // A (x) B (x) B
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Eigen::MatrixXcd bb(4, 4);
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) bb.block(k * 2, l * 2, 2, 2) = b(k, l) * b;
            abb.block(i * 4, j * 4, 4, 4) = a(i, j) * bb;
        }
    const std::complex<double> tra = a.trace(), trb = b.trace();
    const std::complex<double> trab = (a * b).trace(), trb2 = (b * b).trace();
    const std::complex<double> trab2 = (a * b * b).trace();
    const std::complex<double> expected[6] = {tra * trb * trb, trab * trb,    trab * trb,
                                              tra * trb2,      trab2,         trab2};
    for (int k = 0; k < 6; ++k) {
        const std::complex<double> got =
            (permutation_operator(w.permutations[static_cast<std::size_t>(k)], 2) * abb).trace();
        CHECK(std::abs(got - expected[k]) < 1e-10);
    }
}

TEST_CASE("haar threefold twirl: identity fixed, trace preserved") {
    RngStream rng = RngStream::derive(51, "oracle_haar", 0);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(8, 8);
    CHECK((haar_threefold_twirl(id, 2) - id).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXcd a = random_hermitian(8, rng);
    CHECK(std::abs(haar_threefold_twirl(a, 2).trace() - a.trace()) < 1e-9);
    CHECK_THROWS_AS(haar_threefold_twirl(Eigen::MatrixXcd::Identity(4, 4), 2), DimensionError);
}

TEST_CASE("haar threefold twirl equals the empirical single-qubit Clifford average") {
    RngStream rng = RngStream::derive(52, "oracle_3design", 0);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::MatrixXcd a = random_hermitian(8, rng);
        Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(8, 8);
        for (std::size_t i = 0; i < 24; ++i) {
            const Eigen::MatrixXcd u3 = kron3(cl1_matrix(i));
            avg += u3.adjoint() * a * u3;
        }
        avg /= 24.0;
        CHECK((haar_threefold_twirl(a, 2) - avg).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("symmetric projector traces match the explicit projector construction") {
    RngStream rng = RngStream::derive(53, "oracle_sym", 0);
    for (int d : {2, 3}) {
        const Eigen::MatrixXcd a = random_hermitian(d, rng);
        const Eigen::MatrixXcd b = random_hermitian(d, rng);
        const auto [two, three] = symmetric_projector_traces(a, b);

        Eigen::MatrixXcd ab(d * d, d * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) ab.block(i * d, j * d, d, d) = a(i, j) * b;
        const double two_explicit = (symmetric_projector(d, 2) * ab).trace().real();
        CHECK(two == doctest::Approx(two_explicit).epsilon(1e-10));

        Eigen::MatrixXcd bb(d * d, d * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) bb.block(i * d, j * d, d, d) = b(i, j) * b;
        Eigen::MatrixXcd abb(d * d * d, d * d * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                abb.block(i * d * d, j * d * d, d * d, d * d) = a(i, j) * bb;
        const double three_explicit = (symmetric_projector(d, 3) * abb).trace().real();
        CHECK(three == doctest::Approx(three_explicit).epsilon(1e-10));
    }
}

TEST_CASE("symmetric projector trace examples") {
    const Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(2, 2);
    const auto [two, three] = symmetric_projector_traces(id2, id2);
    CHECK(two == doctest::Approx(3.0));
    Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(2, 2);
    p0(0, 0) = 1.0;
    CHECK(symmetric_projector_traces(p0, p0).second == doctest::Approx(1.0));
}

TEST_CASE("GHZ state forms") {
    const GhzState g = ghz_state(2);
    Eigen::VectorXcd expect(4);
    expect << 1.0 / std::sqrt(2.0), 0, 0, 1.0 / std::sqrt(2.0);
    CHECK((g.dense - expect).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::VectorXcd from_circuit = Eigen::VectorXcd::Zero(4);
    from_circuit[0] = 1.0;
    dense::apply_gates(from_circuit, g.circuit, 2);
    CHECK((from_circuit - expect).cwiseAbs().maxCoeff() < 1e-14);
    // stabilizers fix the state
    for (const auto& s : g.stabilizers) {
        const Eigen::MatrixXcd m = dense_pauli(s);
        CHECK((m * g.dense - g.dense).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("TFIM ground state: n = 2 energy is -sqrt(5), Lanczos matches dense") {
    const TfimGroundState g2 = tfim_ground_state(2, 1.0, 1.0);
    CHECK(g2.energy == doctest::Approx(-std::sqrt(5.0)).epsilon(1e-10));

    for (std::size_t n : {3, 5, 6}) {
        const TfimGroundState g = tfim_ground_state(n, 1.0, 1.0);
        const Eigen::Index dim = Eigen::Index{1} << n;
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index s = 0; s < dim; ++s) {
            double diag = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const int zi = ((s >> (n - 1 - i)) & 1) ? -1 : 1;
                const int zj = ((s >> (n - 2 - i)) & 1) ? -1 : 1;
                diag += zi * zj;
            }
            h(s, s) = diag;
            for (std::size_t i = 0; i < n; ++i) h(s, s ^ (Eigen::Index{1} << (n - 1 - i))) += 1.0;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        CHECK(g.energy == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-9));
        // energy expectation of the returned vector
        const Eigen::VectorXcd hv = h.cast<std::complex<double>>() * g.state;
        CHECK(std::abs(g.state.dot(hv).real() - g.energy) < 1e-8);
    }
}

TEST_CASE("exact expectation") {
    Eigen::MatrixXcd z = dense_pauli(PauliString::from_label("Z"));
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(2, 2);
    rho0(0, 0) = 1.0;
    CHECK(exact_expectation_dense(z, rho0) == doctest::Approx(1.0));
    Eigen::MatrixXcd x = dense_pauli(PauliString::from_label("X"));
    CHECK(exact_expectation_dense(x, rho0) == doctest::Approx(0.0));
    const GhzState g = ghz_state(4);
    const Eigen::MatrixXcd proj = g.dense * g.dense.adjoint();
    CHECK(exact_expectation_dense(proj, proj) == doctest::Approx(1.0));
}

TEST_CASE("twirl outputs are block diagonal in the group projectors") {
    // off-block mass of the global twirl: everything off the diagonal
    for (const NoiseSpec& s : {NoiseSpec::amplitude_damping(0.3, 1), NoiseSpec::x_rotation(0.5, 1)}) {
        const Eigen::MatrixXd tw = brute_force_twirl(s, TwirlGroup::Cl2Full);
        Eigen::MatrixXd off = tw;
        off.diagonal().setZero();
        CHECK(off.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(tw(1, 1) - tw(2, 2)) < 1e-12);
        CHECK(std::abs(tw(1, 1) - tw(3, 3)) < 1e-12);
    }
}

TEST_CASE("second moment of the global fidelity estimator: 2(1+2F_Z)/((d+2)(d+1))") {
    // brute-force E(F^2) over the 24 Cliffords at n = 1
    for (const NoiseSpec& s : {NoiseSpec::identity(1), NoiseSpec::measurement_bitflip(0.15, 1),
                               NoiseSpec::amplitude_damping(0.25, 1)}) {
        double second = 0.0;
        for (std::size_t i = 0; i < 24; ++i) {
            const Eigen::MatrixXcd u = cl1_matrix(i);
            Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
            rho(0, 0) = 1.0;
            const Eigen::MatrixXcd evolved = s.apply_dense(u * rho * u.adjoint());
            for (int b = 0; b < 2; ++b) {
                const double pb = evolved(b, b).real();
                const double fhat = std::norm(u(b, 0));
                second += pb * fhat * fhat / 24.0;
            }
        }
        const double fz = z_basis_fidelity(s);
        CHECK(second == doctest::Approx(2.0 * (1.0 + 2.0 * fz) / (4.0 * 3.0)).epsilon(1e-12));
    }
}

TEST_CASE("second moment of the local pattern estimator is exactly 3^-|z|") {
    // brute force over the 576-element product group at n = 2
    const NoiseSpec noise = NoiseSpec::amplitude_damping(0.35, 2);
    for (const char* zs : {"11", "10", "01"}) {
        const BitString z = BitString::from_string(zs);
        const PauliString pz = PauliString::z_string(z);
        double second = 0.0;
        for (std::size_t i = 0; i < 24; ++i) {
            for (std::size_t j = 0; j < 24; ++j) {
                Eigen::MatrixXcd u(4, 4);
                const Eigen::MatrixXcd ui = cl1_matrix(i), uj = cl1_matrix(j);
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c) u.block(r * 2, c * 2, 2, 2) = ui(r, c) * uj;
                Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(4, 4);
                rho(0, 0) = 1.0;
                const Eigen::MatrixXcd evolved = noise.apply_dense(u * rho * u.adjoint());
                const Eigen::MatrixXcd zmat = u * dense_pauli(pz) * u.adjoint();
                for (int b = 0; b < 4; ++b) {
                    const double pb = evolved(b, b).real();
                    const double est = zmat(b, b).real();
                    second += pb * est * est / 576.0;
                }
            }
        }
        CHECK(second ==
              doctest::Approx(std::pow(3.0, -static_cast<double>(z.weight()))).epsilon(1e-12));
    }
}

TEST_CASE("cl4 enumeration is gated and has the right size when enabled") {
    if (!std::getenv("RSHADOW_RUN_SLOW_TESTS")) return;
    const auto all = enumerate_cl4();
    CHECK(all.size() == 11520);
    const Eigen::MatrixXd tw =
        brute_force_twirl(NoiseSpec::measurement_bitflip(0.1, 2), TwirlGroup::Cl4Full);
    const Eigen::MatrixXd predicted =
        predicted_twirl_ptm(NoiseSpec::measurement_bitflip(0.1, 2), GroupTag::Global);
    CHECK((tw - predicted).cwiseAbs().maxCoeff() < 1e-12);
}

}  // TEST_SUITE
