#include "doctest.h"

#include <Eigen/Dense>
#include <map>
#include <set>

#include "rshadow/dense_ops.hpp"
#include "rshadow/oracle.hpp"

using namespace rshadow;

namespace {

Eigen::MatrixXcd tableau_matrix(const StabilizerTableau& t) {
    return dense::gates_to_matrix(t.synthesize(), t.size());
}

Eigen::MatrixXcd cl1_matrix(int idx) {
    const auto& m = cl1_table()[static_cast<std::size_t>(idx)].unitary;
    Eigen::MatrixXcd u(2, 2);
    u << m[0][0], m[0][1], m[1][0], m[1][1];
    return u;
}

// Key identifying a Clifford by its conjugation action on X and Z.
std::string action_key(const StabilizerTableau& t) {
    std::string s;
    for (std::size_t j = 0; j < t.size(); ++j)
        s += t.destabilizer(j).to_label() + "|" + t.stabilizer(j).to_label() + "|";
    return s;
}

}  // namespace

TEST_SUITE("clifford") {

TEST_CASE("single-qubit table: 24 distinct elements, identity first") {
    const auto& table = cl1_table();
    CHECK(table[0].word.empty());
    std::set<std::string> keys;
    for (int i = 0; i < 24; ++i) {
        // the unitary must realize the tabulated conjugation action
        const Eigen::MatrixXcd u = cl1_matrix(i);
        for (int slot = 1; slot < 4; ++slot) {
            const bool x = slot & 1, z = slot & 2;
            PauliString p = PauliString::single(1, 0, x, z);
            const auto& a = table[static_cast<std::size_t>(i)].action[static_cast<std::size_t>(slot)];
            PauliString img = PauliString::single(1, 0, a.x, a.z);
            img.set_phase_exponent(a.phase);
            const Eigen::MatrixXcd lhs = u * oracle::dense_pauli(p) * u.adjoint();
            CHECK((lhs - oracle::dense_pauli(img)).cwiseAbs().maxCoeff() < 1e-12);
            keys.insert(std::to_string(i));
        }
    }
    CHECK(keys.size() == 24);
}

TEST_CASE("H conjugates X to Z") {
    StabilizerTableau t = StabilizerTableau::identity(1);
    t.apply_h(0);
    CHECK(t.conjugate(PauliString::from_label("X")).to_label() == "+Z");
    CHECK(t.conjugate(PauliString::from_label("Z")).to_label() == "+X");
    CHECK(t.conjugate(PauliString::from_label("Y")).to_label() == "-Y");
}

TEST_CASE("identity tableau conjugation is trivial") {
    StabilizerTableau t = StabilizerTableau::identity(3);
    const PauliString p = PauliString::from_label("-iXYZ");
    CHECK(t.conjugate(p) == p);
}

TEST_CASE("gate conjugation rules match dense 4x4 conjugation for all two-qubit Paulis") {
    struct Case {
        GateOp g;
        const char* name;
    };
    const Case cases[] = {{GateOp::cx(0, 1), "CX"}, {GateOp::cz(0, 1), "CZ"},
                          {GateOp::h(0), "H0"},      {GateOp::s(1), "S1"},
                          {GateOp::sdg(0), "Sdg0"},  {GateOp::x(1), "X1"},
                          {GateOp::z(0), "Z0"}};
    for (const auto& c : cases) {
        StabilizerTableau t = StabilizerTableau::identity(2);
        t.apply_gate(c.g);
        const Eigen::MatrixXcd u = dense::gates_to_matrix({c.g}, 2);
        for (std::size_t a = 0; a < 16; ++a) {
            const PauliString p = oracle::pauli_from_index(a, 2);
            const Eigen::MatrixXcd expected = u * oracle::dense_pauli(p) * u.adjoint();
            CHECK_MESSAGE(
                (oracle::dense_pauli(t.conjugate(p)) - expected).cwiseAbs().maxCoeff() < 1e-12,
                c.name);
        }
    }
}

TEST_CASE("synthesis reproduces the tableau and dense conjugation agrees, n = 3") {
    RngStream rng = RngStream::derive(21, "clifford_synth", 0);
    for (int trial = 0; trial < 30; ++trial) {
        const StabilizerTableau t = StabilizerTableau::sample_uniform(3, rng);
        REQUIRE(t.valid());
        StabilizerTableau rebuilt = StabilizerTableau::identity(3);
        rebuilt.apply_gates(t.synthesize());
        CHECK(rebuilt == t);

        const Eigen::MatrixXcd u = tableau_matrix(t);
        CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
        const std::size_t a = rng.below(64);
        const PauliString p = oracle::pauli_from_index(a, 3);
        const Eigen::MatrixXcd expected = u * oracle::dense_pauli(p) * u.adjoint();
        CHECK((oracle::dense_pauli(t.conjugate(p)) - expected).cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("conjugation is a right group action under composition") {
    RngStream rng = RngStream::derive(22, "clifford_action", 0);
    for (int trial = 0; trial < 20; ++trial) {
        const StabilizerTableau u = StabilizerTableau::sample_uniform(4, rng);
        const StabilizerTableau v = StabilizerTableau::sample_uniform(4, rng);
        const StabilizerTableau uv = u.compose(v);
        const PauliString p = oracle::pauli_from_index(rng.below(256), 4);
        CHECK(uv.conjugate(p) == u.conjugate(v.conjugate(p)));
    }
}

TEST_CASE("amplitude probabilities: identity and Hadamard") {
    StabilizerTableau id = StabilizerTableau::identity(2);
    CHECK(id.amplitude_probability(BitString::from_string("00")) == 1.0);
    CHECK(id.amplitude_probability(BitString::from_string("01")) == 0.0);
    StabilizerTableau h = StabilizerTableau::identity(1);
    h.apply_h(0);
    CHECK(h.amplitude_probability(BitString::from_string("0")) == 0.5);
    CHECK(h.amplitude_probability(BitString::from_string("1")) == 0.5);
}

TEST_CASE("amplitudes match the dense state vector and sum to one, n = 4") {
    RngStream rng = RngStream::derive(23, "clifford_amp", 0);
    for (int trial = 0; trial < 200; ++trial) {
        const StabilizerTableau t = StabilizerTableau::sample_uniform(4, rng);
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
        psi[0] = 1.0;
        dense::apply_gates(psi, t.synthesize(), 4);
        double total = 0.0;
        for (std::size_t idx = 0; idx < 16; ++idx) {
            const BitString b = dense::bitstring_of(idx, 4);
            const double p = t.amplitude_probability(b);
            CHECK(p == doctest::Approx(std::norm(psi[static_cast<Eigen::Index>(idx)]))
                           .epsilon(1e-12));
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("uniform sampling: n = 1 hits all 24 classes uniformly") {
    RngStream rng = RngStream::derive(24, "clifford_chi2", 0);
    std::map<std::string, int> counts;
    const int draws = 24000;
    for (int i = 0; i < draws; ++i)
        counts[action_key(StabilizerTableau::sample_uniform(1, rng))]++;
    REQUIRE(counts.size() == 24);
    // chi-square against uniform: 23 dof, 5-sigma-ish cutoff ~ 60
    double chi2 = 0.0;
    const double expect = draws / 24.0;
    for (const auto& [k, c] : counts) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < 60.0);
}

TEST_CASE("uniform sampling: induced image of X tensor I is uniform over signed Paulis") {
    RngStream rng = RngStream::derive(25, "clifford_img", 0);
    const PauliString xi = PauliString::from_label("XI");
    std::map<std::string, int> counts;
    const int draws = 30000;
    for (int i = 0; i < draws; ++i) {
        const StabilizerTableau t = StabilizerTableau::sample_uniform(2, rng);
        counts[t.conjugate(xi).to_label()]++;
    }
    // 15 non-identity patterns x 2 signs
    REQUIRE(counts.size() == 30);
    double chi2 = 0.0;
    const double expect = draws / 30.0;
    for (const auto& [k, c] : counts) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < 75.0);  // 29 dof
}

TEST_CASE("uniform sampling: n = 2 frequencies over the full 11520-element group") {
    if (!std::getenv("RSHADOW_RUN_SLOW_TESTS")) return;
    RngStream rng = RngStream::derive(33, "clifford_chi2_full", 0);
    std::map<std::string, int> counts;
    const int per_class = 12;
    const int draws = 11520 * per_class;
    for (int i = 0; i < draws; ++i)
        counts[action_key(StabilizerTableau::sample_uniform(2, rng))]++;
    REQUIRE(counts.size() == 11520);
    double chi2 = 0.0;
    for (const auto& [k, c] : counts)
        chi2 += (c - per_class) * double(c - per_class) / per_class;
    // dof = 11519; five-sigma band is dof + 5 sqrt(2 dof)
    CHECK(chi2 < 11519 + 5.0 * std::sqrt(2.0 * 11519));
}

TEST_CASE("sampling is deterministic in the derived stream") {
    RngStream a = RngStream::derive(99, "clifford", 7);
    RngStream b = RngStream::derive(99, "clifford", 7);
    CHECK(StabilizerTableau::sample_uniform(5, a) == StabilizerTableau::sample_uniform(5, b));
    RngStream c = RngStream::derive(99, "clifford", 8);
    CHECK_FALSE(StabilizerTableau::sample_uniform(5, a) ==
                StabilizerTableau::sample_uniform(5, c));
}

TEST_CASE("local word sampling: marginals uniform, deterministic under seed") {
    RngStream rng = RngStream::derive(26, "word_chi2", 0);
    std::array<int, 24> counts{};
    const int draws = 24000;
    for (int i = 0; i < draws; ++i) {
        const LocalCliffordWord w = sample_local_clifford(3, rng);
        counts[w.index(0)]++;
    }
    double chi2 = 0.0;
    const double expect = draws / 24.0;
    for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < 60.0);

    RngStream a = RngStream::derive(7, "w", 3), b = RngStream::derive(7, "w", 3);
    CHECK(sample_local_clifford(6, a) == sample_local_clifford(6, b));
}

TEST_CASE("local word conjugation matches dense per-qubit conjugation") {
    RngStream rng = RngStream::derive(27, "word_conj", 0);
    for (int trial = 0; trial < 50; ++trial) {
        const LocalCliffordWord w = sample_local_clifford(2, rng);
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(1, 1);
        for (std::size_t q = 0; q < 2; ++q) {
            const Eigen::MatrixXcd uq = cl1_matrix(w.index(q));
            Eigen::MatrixXcd next(u.rows() * 2, u.cols() * 2);
            for (Eigen::Index i = 0; i < u.rows(); ++i)
                for (Eigen::Index j = 0; j < u.cols(); ++j)
                    next.block(i * 2, j * 2, 2, 2) = u(i, j) * uq;
            u = next;
        }
        const PauliString p = oracle::pauli_from_index(rng.below(16), 2);
        const Eigen::MatrixXcd expected = u * oracle::dense_pauli(p) * u.adjoint();
        CHECK((oracle::dense_pauli(w.conjugate(p)) - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("measurement: fixed states") {
    RngStream rng = RngStream::derive(28, "measure", 0);
    StabilizerTableau zero = StabilizerTableau::identity(3);
    CHECK(zero.measure_all_z(rng).to_string() == "000");

    int ones = 0;
    const int shots = 10000;
    for (int i = 0; i < shots; ++i) {
        StabilizerTableau h = StabilizerTableau::identity(1);
        h.apply_h(0);
        ones += h.measure_all_z(rng).bit(0);
    }
    // binomial 5-sigma band around 1/2
    CHECK(std::abs(ones - shots / 2.0) < 5.0 * std::sqrt(shots * 0.25));
}

TEST_CASE("measurement: GHZ outcomes are all-zeros or all-ones only") {
    RngStream rng = RngStream::derive(29, "measure_ghz", 0);
    for (int i = 0; i < 500; ++i) {
        StabilizerTableau g = StabilizerTableau::identity(4);
        g.apply_h(0);
        g.apply_cx(0, 1);
        g.apply_cx(1, 2);
        g.apply_cx(2, 3);
        const std::string b = g.measure_all_z(rng).to_string();
        CHECK((b == "0000" || b == "1111"));
    }
}

TEST_CASE("measurement collapse: repeated measurement is reproducible") {
    RngStream rng = RngStream::derive(30, "measure_collapse", 0);
    for (int i = 0; i < 50; ++i) {
        StabilizerTableau t = StabilizerTableau::sample_uniform(3, rng);
        const BitString first = t.measure_all_z(rng);
        const BitString second = t.measure_all_z(rng);
        CHECK(first == second);
    }
}

TEST_CASE("tableau text round trip") {
    RngStream rng = RngStream::derive(31, "tableau_text", 0);
    for (int i = 0; i < 20; ++i) {
        const StabilizerTableau t = StabilizerTableau::sample_uniform(4, rng);
        CHECK(StabilizerTableau::from_string(t.to_string()) == t);
    }
    CHECK_THROWS_AS(StabilizerTableau::from_string("XX;ZZ,ZI"), ValidationError);
}

TEST_CASE("local word text round trip") {
    RngStream rng = RngStream::derive(32, "word_text", 0);
    const LocalCliffordWord w = sample_local_clifford(5, rng);
    CHECK(LocalCliffordWord::from_string(w.to_string()) == w);
}

}  // TEST_SUITE
