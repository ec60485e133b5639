#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rshadow/errors.hpp"

namespace rshadow {

/// Fixed-length bit vector packed into 64-bit words.
class BitString {
  public:
    BitString() = default;
    explicit BitString(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitString zeros(std::size_t n) { return BitString(n); }
    static BitString ones(std::size_t n);
    static BitString from_string(const std::string& bits);

    std::size_t size() const { return n_; }
    bool bit(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, bool v);
    void flip(std::size_t i) { w_[i >> 6] ^= (std::uint64_t{1} << (i & 63)); }

    std::size_t weight() const;
    bool any() const;

    BitString& operator^=(const BitString& o);
    friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }

    /// Inner product mod 2.
    int dot(const BitString& o) const;

    std::string to_string() const;

    bool operator==(const BitString& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator<(const BitString& o) const;

    const std::vector<std::uint64_t>& words() const { return w_; }
    std::vector<std::uint64_t>& words() { return w_; }

  private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

/// n-qubit Pauli operator in the symplectic encoding
///   P = i^phase * P_(ax,az),   P_(ax,az) = i^(ax.az) X^ax Z^az,
/// with the X/Z indicator vectors packed into 64-bit words.
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(std::size_t n) : n_(n), ax_(n), az_(n) {}

    static PauliString identity(std::size_t n) { return PauliString(n); }

    /// Parse a label like "XZI", "-YY", "+iXZ", "-iZ".
    static PauliString from_label(const std::string& label);

    /// Single-site constructor: x/z bits at `site`, identity elsewhere.
    static PauliString single(std::size_t n, std::size_t site, bool x, bool z);

    /// The Z-type Pauli with pattern m (Z on every set bit of m).
    static PauliString z_string(const BitString& m);

    std::size_t size() const { return n_; }
    int phase_exponent() const { return phase_; }
    void set_phase_exponent(int p) { phase_ = static_cast<std::uint8_t>(((p % 4) + 4) % 4); }

    bool x_bit(std::size_t i) const { return ax_.bit(i); }
    bool z_bit(std::size_t i) const { return az_.bit(i); }
    void set_xz(std::size_t i, bool x, bool z);

    const BitString& ax() const { return ax_; }
    const BitString& az() const { return az_; }
    BitString& ax() { return ax_; }
    BitString& az() { return az_; }

    /// Number of sites carrying a non-identity factor.
    std::size_t weight() const;

    /// z(a): bit i set iff site i is non-identity.
    BitString support_pattern() const;

    bool is_identity_bits() const { return !ax_.any() && !az_.any(); }

    /// +1 / -1 for phase exponent 0 / 2; throws on odd phase (non-Hermitian).
    int hermitian_sign() const;

    PauliString& operator*=(const PauliString& o);
    friend PauliString operator*(PauliString a, const PauliString& b) { return a *= b; }

    bool commutes_with(const PauliString& o) const;

    /// <b| P |b> for computational basis state b: 0 if P has any X/Y factor,
    /// else hermitian_sign * (-1)^(az.b).
    int expectation_zbasis(const BitString& b) const;

    std::string to_label() const;

    bool operator==(const PauliString& o) const {
        return n_ == o.n_ && phase_ == o.phase_ && ax_ == o.ax_ && az_ == o.az_;
    }

  private:
    std::size_t n_ = 0;
    std::uint8_t phase_ = 0;
    BitString ax_, az_;
};

/// <a,b> = ax.bz - az.bx mod 4.  (-1)^<a,b> is the commutation sign.
int symplectic_product(const PauliString& a, const PauliString& b);

PauliString pauli_multiply(const PauliString& a, const PauliString& b);

enum class GroupTag { Global, Local };

std::string to_string(GroupTag g);
GroupTag group_tag_from_string(const std::string& s);

/// Diagonal superoperator in the Pauli basis: 1 on the identity component,
/// and on |sigma_a>> either a single scalar f (global tag, any a != 0) or
/// f_{z(a)} looked up in a sparse pattern table (local tag).
class PTMDiagonal {
  public:
    PTMDiagonal() = default;

    static PTMDiagonal global(std::size_t n, double f);
    static PTMDiagonal local(std::size_t n, std::map<BitString, double> coeffs);

    /// Noiseless coefficients: f = 1/(2^n + 1).
    static PTMDiagonal standard_global(std::size_t n);
    /// Noiseless coefficients: f_z = 3^{-|z|} over the given pattern set.
    static PTMDiagonal standard_local(std::size_t n, const std::vector<BitString>& patterns);

    GroupTag group() const { return group_; }
    std::size_t size() const { return n_; }

    double global_coefficient() const;

    bool covers(const BitString& pattern) const;
    double coefficient(const BitString& pattern) const;

    /// Eigenvalue on |sigma_a>>.
    double eigenvalue(const PauliString& a) const;

    /// All stored (pattern, coefficient) pairs; for the global tag a single
    /// entry keyed by the all-ones placeholder is NOT used -- call
    /// global_coefficient() instead.
    const std::map<BitString, double>& pattern_coefficients() const { return coeffs_; }

    bool is_invertible() const;

    /// Reciprocal coefficients; identity block stays 1.  Throws
    /// NonInvertibleError if any |coefficient| < floor.
    PTMDiagonal inverse(double floor = 0.0) const;

    /// Entrywise product (composition of commuting diagonals).  Both operands
    /// must share the group tag; local tags compose on the pattern
    /// intersection of their tables.
    PTMDiagonal& operator*=(const PTMDiagonal& o);
    friend PTMDiagonal operator*(PTMDiagonal a, const PTMDiagonal& b) { return a *= b; }

  private:
    GroupTag group_ = GroupTag::Global;
    std::size_t n_ = 0;
    double f_ = 1.0;
    std::map<BitString, double> coeffs_;
};

}  // namespace rshadow
