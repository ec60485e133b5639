#include "rshadow/pauli.hpp"

#include <bit>
#include <cmath>

namespace rshadow {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": size mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
    }
}

std::size_t popcount_words(const std::vector<std::uint64_t>& w) {
    std::size_t c = 0;
    for (auto v : w) c += static_cast<std::size_t>(std::popcount(v));
    return c;
}

}  // namespace

BitString BitString::ones(std::size_t n) {
    BitString b(n);
    for (std::size_t i = 0; i < n; ++i) b.set(i, true);
    return b;
}

BitString BitString::from_string(const std::string& bits) {
    BitString b(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            b.set(i, true);
        } else if (bits[i] != '0') {
            throw ValidationError("bit string must contain only 0/1: " + bits);
        }
    }
    return b;
}

void BitString::set(std::size_t i, bool v) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v) {
        w_[i >> 6] |= mask;
    } else {
        w_[i >> 6] &= ~mask;
    }
}

std::size_t BitString::weight() const { return popcount_words(w_); }

bool BitString::any() const {
    for (auto v : w_)
        if (v) return true;
    return false;
}

BitString& BitString::operator^=(const BitString& o) {
    require_same_size(n_, o.n_, "BitString xor");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
}

int BitString::dot(const BitString& o) const {
    require_same_size(n_, o.n_, "BitString dot");
    std::size_t c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
    return static_cast<int>(c & 1);
}

std::string BitString::to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
        if (bit(i)) s[i] = '1';
    return s;
}

bool BitString::operator<(const BitString& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    return w_ < o.w_;
}

PauliString PauliString::from_label(const std::string& label) {
    std::size_t pos = 0;
    int phase = 0;
    if (pos < label.size() && (label[pos] == '+' || label[pos] == '-')) {
        if (label[pos] == '-') phase = 2;
        ++pos;
    }
    if (pos < label.size() && (label[pos] == 'i')) {
        phase = (phase + 1) % 4;
        ++pos;
    }
    PauliString p(label.size() - pos);
    p.phase_ = static_cast<std::uint8_t>(phase);
    for (std::size_t i = 0; pos < label.size(); ++i, ++pos) {
        switch (label[pos]) {
            case 'I': break;
            case 'X': p.set_xz(i, true, false); break;
            case 'Y': p.set_xz(i, true, true); break;
            case 'Z': p.set_xz(i, false, true); break;
            default:
                throw ValidationError("invalid Pauli label character: " +
                                      std::string(1, label[pos]));
        }
    }
    return p;
}

PauliString PauliString::single(std::size_t n, std::size_t site, bool x, bool z) {
    PauliString p(n);
    p.set_xz(site, x, z);
    return p;
}

PauliString PauliString::z_string(const BitString& m) {
    PauliString p(m.size());
    p.az_ = m;
    return p;
}

void PauliString::set_xz(std::size_t i, bool x, bool z) {
    ax_.set(i, x);
    az_.set(i, z);
}

std::size_t PauliString::weight() const {
    std::size_t c = 0;
    const auto& wx = ax_.words();
    const auto& wz = az_.words();
    for (std::size_t i = 0; i < wx.size(); ++i) c += std::popcount(wx[i] | wz[i]);
    return c;
}

BitString PauliString::support_pattern() const {
    BitString z(n_);
    auto& w = z.words();
    const auto& wx = ax_.words();
    const auto& wz = az_.words();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = wx[i] | wz[i];
    return z;
}

int PauliString::hermitian_sign() const {
    if (phase_ & 1) throw ValidationError("Pauli has odd phase exponent (non-Hermitian)");
    return phase_ == 0 ? 1 : -1;
}

int symplectic_product(const PauliString& a, const PauliString& b) {
    require_same_size(a.size(), b.size(), "symplectic product");
    const auto& ax = a.ax().words();
    const auto& az = a.az().words();
    const auto& bx = b.ax().words();
    const auto& bz = b.az().words();
    long long s = 0;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        s += std::popcount(ax[i] & bz[i]);
        s -= std::popcount(az[i] & bx[i]);
    }
    return static_cast<int>(((s % 4) + 4) % 4);
}

PauliString& PauliString::operator*=(const PauliString& o) {
    // i^pa P_a . i^pb P_b = i^(pa+pb+e) P_(a+b) with, summed over sites,
    // e = ax.az + bx.bz - (ax^bx).(az^bz) + 2 az.bx   (matrix-product order)
    require_same_size(n_, o.n_, "Pauli multiply");
    const auto& ax = ax_.words();
    const auto& az = az_.words();
    const auto& bx = o.ax_.words();
    const auto& bz = o.az_.words();
    long long e = phase_ + o.phase_;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        e += std::popcount(ax[i] & az[i]);
        e += std::popcount(bx[i] & bz[i]);
        e -= std::popcount((ax[i] ^ bx[i]) & (az[i] ^ bz[i]));
        e += 2 * std::popcount(az[i] & bx[i]);
    }
    phase_ = static_cast<std::uint8_t>(((e % 4) + 4) % 4);
    ax_ ^= o.ax_;
    az_ ^= o.az_;
    return *this;
}

bool PauliString::commutes_with(const PauliString& o) const {
    return (symplectic_product(*this, o) & 1) == 0;
}

int PauliString::expectation_zbasis(const BitString& b) const {
    if (ax_.any()) return 0;
    int sign = hermitian_sign();
    return (az_.dot(b) != 0) ? -sign : sign;
}

std::string PauliString::to_label() const {
    static const char* prefixes[4] = {"+", "+i", "-", "-i"};
    std::string s = prefixes[phase_];
    for (std::size_t i = 0; i < n_; ++i) {
        const bool x = ax_.bit(i), z = az_.bit(i);
        s += x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
    }
    return s;
}

PauliString pauli_multiply(const PauliString& a, const PauliString& b) { return a * b; }

std::string to_string(GroupTag g) { return g == GroupTag::Global ? "global" : "local"; }

GroupTag group_tag_from_string(const std::string& s) {
    if (s == "global") return GroupTag::Global;
    if (s == "local") return GroupTag::Local;
    throw ValidationError("unknown group tag: " + s);
}

PTMDiagonal PTMDiagonal::global(std::size_t n, double f) {
    PTMDiagonal m;
    m.group_ = GroupTag::Global;
    m.n_ = n;
    m.f_ = f;
    return m;
}

PTMDiagonal PTMDiagonal::local(std::size_t n, std::map<BitString, double> coeffs) {
    PTMDiagonal m;
    m.group_ = GroupTag::Local;
    m.n_ = n;
    m.coeffs_ = std::move(coeffs);
    m.coeffs_[BitString::zeros(n)] = 1.0;  // trace preservation
    return m;
}

PTMDiagonal PTMDiagonal::standard_global(std::size_t n) {
    return global(n, 1.0 / (std::ldexp(1.0, static_cast<int>(n)) + 1.0));
}

PTMDiagonal PTMDiagonal::standard_local(std::size_t n, const std::vector<BitString>& patterns) {
    std::map<BitString, double> c;
    for (const auto& z : patterns) {
        c[z] = std::pow(3.0, -static_cast<double>(z.weight()));
    }
    return local(n, std::move(c));
}

double PTMDiagonal::global_coefficient() const {
    if (group_ != GroupTag::Global) throw ValidationError("not a global-tag diagonal");
    return f_;
}

bool PTMDiagonal::covers(const BitString& pattern) const {
    if (group_ == GroupTag::Global) return true;
    return !pattern.any() || coeffs_.count(pattern) > 0;
}

double PTMDiagonal::coefficient(const BitString& pattern) const {
    if (!pattern.any()) return 1.0;
    if (group_ == GroupTag::Global) return f_;
    auto it = coeffs_.find(pattern);
    if (it == coeffs_.end()) throw MissingPatternError(pattern.to_string());
    return it->second;
}

double PTMDiagonal::eigenvalue(const PauliString& a) const {
    if (a.size() != n_) throw DimensionError("PTMDiagonal::eigenvalue: size mismatch");
    if (a.is_identity_bits()) return 1.0;
    return coefficient(a.support_pattern());
}

bool PTMDiagonal::is_invertible() const {
    if (group_ == GroupTag::Global) return f_ != 0.0;
    for (const auto& [z, c] : coeffs_)
        if (c == 0.0) return false;
    return true;
}

PTMDiagonal PTMDiagonal::inverse(double floor) const {
    PTMDiagonal out = *this;
    if (group_ == GroupTag::Global) {
        if (std::abs(f_) < floor || f_ == 0.0) {
            throw NonInvertibleError("coefficient " + std::to_string(f_) +
                                     " below inversion floor " + std::to_string(floor));
        }
        out.f_ = 1.0 / f_;
        return out;
    }
    for (auto& [z, c] : out.coeffs_) {
        if (!z.any()) continue;
        if (std::abs(c) < floor || c == 0.0) {
            throw NonInvertibleError("coefficient for pattern " + z.to_string() + " (" +
                                     std::to_string(c) + ") below inversion floor " +
                                     std::to_string(floor));
        }
        c = 1.0 / c;
    }
    return out;
}

PTMDiagonal& PTMDiagonal::operator*=(const PTMDiagonal& o) {
    if (group_ != o.group_ || n_ != o.n_)
        throw ValidationError("PTMDiagonal composition: mismatched tag or size");
    if (group_ == GroupTag::Global) {
        f_ *= o.f_;
        return *this;
    }
    std::map<BitString, double> merged;
    for (const auto& [z, c] : coeffs_) {
        auto it = o.coeffs_.find(z);
        if (it != o.coeffs_.end()) merged[z] = c * it->second;
    }
    coeffs_ = std::move(merged);
    coeffs_[BitString::zeros(n_)] = 1.0;
    return *this;
}

}  // namespace rshadow
