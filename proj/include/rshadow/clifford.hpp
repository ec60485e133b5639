#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rshadow/pauli.hpp"
#include "rshadow/rng.hpp"

namespace rshadow {

struct GateOp {
    enum class Kind : std::uint8_t { H, S, Sdg, X, Z, CX, CZ };
    Kind kind;
    std::uint32_t q0 = 0;
    std::uint32_t q1 = 0;

    static GateOp h(std::uint32_t q) { return {Kind::H, q, 0}; }
    static GateOp s(std::uint32_t q) { return {Kind::S, q, 0}; }
    static GateOp sdg(std::uint32_t q) { return {Kind::Sdg, q, 0}; }
    static GateOp x(std::uint32_t q) { return {Kind::X, q, 0}; }
    static GateOp z(std::uint32_t q) { return {Kind::Z, q, 0}; }
    static GateOp cx(std::uint32_t c, std::uint32_t t) { return {Kind::CX, c, t}; }
    static GateOp cz(std::uint32_t a, std::uint32_t b) { return {Kind::CZ, a, b}; }

    GateOp dagger() const {
        GateOp g = *this;
        if (kind == Kind::S) g.kind = Kind::Sdg;
        else if (kind == Kind::Sdg) g.kind = Kind::S;
        return g;
    }
};

/// One element of the single-qubit Clifford group.
struct Cl1Entry {
    // Conjugation action keyed by the input's (x,z) bits: entry index
    // x + 2z in {1,2,3} (index 0 = identity, unused).  Each action holds the
    // image bits and the phase-exponent increment (0 or 2).
    struct PauliAction {
        std::uint8_t x, z, phase;
    };
    std::array<PauliAction, 4> action;
    std::array<std::array<std::complex<double>, 2>, 2> unitary;
    std::string word;  // generator word over {H, S}, empty for the identity
};

/// The 24 single-qubit Cliffords, identity first, then breadth-first over
/// generator words in {H, S} (H-successor enqueued before S-successor).
const std::array<Cl1Entry, 24>& cl1_table();

/// Index of the table element with the given conjugation action, or -1.
int cl1_index_of_action(const Cl1Entry::PauliAction& x_img, const Cl1Entry::PauliAction& z_img);

class LocalCliffordWord {
  public:
    LocalCliffordWord() = default;
    explicit LocalCliffordWord(std::vector<std::uint8_t> idx) : idx_(std::move(idx)) {}

    std::size_t size() const { return idx_.size(); }
    std::uint8_t index(std::size_t qubit) const { return idx_[qubit]; }

    PauliString conjugate(const PauliString& p) const;

    std::string to_string() const;
    static LocalCliffordWord from_string(const std::string& s);

    bool operator==(const LocalCliffordWord& o) const { return idx_ == o.idx_; }

  private:
    std::vector<std::uint8_t> idx_;
};

LocalCliffordWord sample_local_clifford(std::size_t n, RngStream& rng);

/// Stabilizer tableau: rows destab[j] = U X_j U^dag, stab[j] = U Z_j U^dag,
/// signs carried in each row's phase exponent (always 0 or 2).  Doubles as
/// the state representation for U|0^n> (stab rows generate the stabilizer
/// group, destab rows the destabilizers).
class StabilizerTableau {
  public:
    StabilizerTableau() = default;

    static StabilizerTableau identity(std::size_t n);

    /// Exactly uniform over the n-qubit Clifford group mod global phase.
    /// Built row pair by row pair: each X_j image is drawn uniformly from the
    /// symplectic complement of the previous pairs, the Z_j image uniformly
    /// from the solutions of <x_j, z> = 1, and every row sign is a fair bit.
    static StabilizerTableau sample_uniform(std::size_t n, RngStream& rng);

    std::size_t size() const { return n_; }

    const PauliString& destabilizer(std::size_t j) const { return destab_[j]; }
    const PauliString& stabilizer(std::size_t j) const { return stab_[j]; }
    PauliString& stabilizer(std::size_t j) { return stab_[j]; }

    // In-place conjugation by elementary gates: every row r -> g r g^dag.
    void apply_h(std::size_t q);
    void apply_s(std::size_t q);
    void apply_sdg(std::size_t q);
    void apply_x(std::size_t q);
    void apply_z(std::size_t q);
    void apply_cx(std::size_t c, std::size_t t);
    void apply_cz(std::size_t a, std::size_t b);
    void apply_gate(const GateOp& g);
    void apply_gates(const std::vector<GateOp>& gs);

    /// Apply a single-qubit Clifford from the table at qubit q.
    void apply_cl1(std::size_t q, std::uint8_t table_index);
    void apply_local_word(const LocalCliffordWord& w);

    /// Apply a Pauli gate to the represented state (sign flips only).
    void apply_pauli_gate(const PauliString& p);

    /// U P U^dag with exact phase.
    PauliString conjugate(const PauliString& p) const;

    /// Tableau of this . other  (first apply `other`, then this).
    StabilizerTableau compose(const StabilizerTableau& other) const;

    /// |<b|U|0^n>|^2, exact dyadic value (2^-r or 0).
    double amplitude_probability(const BitString& b) const;

    /// Measure every qubit in order; consumes exactly one uniform per qubit
    /// and collapses the state.
    BitString measure_all_z(RngStream& rng);

    /// Gate sequence implementing U, ready to apply to a state vector.
    std::vector<GateOp> synthesize() const;

    /// Symplectic/commutation invariants; used by tests and after parsing.
    bool valid() const;

    /// Canonical text form "destab0,...;stab0,..." with signed Pauli labels.
    std::string to_string() const;
    static StabilizerTableau from_string(const std::string& s);

    bool operator==(const StabilizerTableau& o) const {
        return n_ == o.n_ && destab_ == o.destab_ && stab_ == o.stab_;
    }

  private:
    std::size_t n_ = 0;
    std::vector<PauliString> destab_, stab_;
};

/// Outcome probability |<b|psi>|^2 of the stabilizer state fixed by the
/// given generating set (n independent commuting signed Paulis).
/// Exact dyadic: 2^-r with r the X-block rank, or 0.
double stabilizer_probability(std::vector<PauliString> generators, const BitString& b);

/// A sampled twirling element: global tableau or local word.
using CliffordElement = std::variant<StabilizerTableau, LocalCliffordWord>;

GroupTag group_of(const CliffordElement& e);
PauliString conjugate_pauli(const CliffordElement& e, const PauliString& p);
std::string clifford_to_string(const CliffordElement& e);
CliffordElement clifford_from_string(GroupTag group, const std::string& s);

}  // namespace rshadow
