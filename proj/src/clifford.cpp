#include "rshadow/clifford.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rshadow {

namespace {

using PauliAction = Cl1Entry::PauliAction;

constexpr int action_slot(bool x, bool z) { return (x ? 1 : 0) + (z ? 2 : 0); }

PauliAction act_h(const PauliAction& a) {
    return {a.z, a.x, static_cast<std::uint8_t>((a.phase + 2 * (a.x & a.z)) & 3)};
}

PauliAction act_s(const PauliAction& a) {
    return {a.x, static_cast<std::uint8_t>(a.x ^ a.z),
            static_cast<std::uint8_t>((a.phase + 2 * (a.x & a.z)) & 3)};
}

int encode_action(const PauliAction& a) { return (a.x << 3) | (a.z << 2) | (a.phase >> 1); }

using Mat2 = std::array<std::array<std::complex<double>, 2>, 2>;

Mat2 make_mat2(std::complex<double> a00, std::complex<double> a01, std::complex<double> a10,
               std::complex<double> a11) {
    Mat2 m;
    m[0][0] = a00;
    m[0][1] = a01;
    m[1][0] = a10;
    m[1][1] = a11;
    return m;
}

Mat2 matmul(const Mat2& a, const Mat2& b) {
    Mat2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

PauliAction derive_y_action(const PauliAction& xi, const PauliAction& zi) {
    // U Y U^dag = U (i X Z) U^dag = i (U X U^dag)(U Z U^dag)
    PauliString px = PauliString::single(1, 0, xi.x, xi.z);
    px.set_phase_exponent(xi.phase);
    PauliString pz = PauliString::single(1, 0, zi.x, zi.z);
    pz.set_phase_exponent(zi.phase);
    PauliString prod = px * pz;
    int phase = (prod.phase_exponent() + 1) % 4;
    return {static_cast<std::uint8_t>(prod.x_bit(0)), static_cast<std::uint8_t>(prod.z_bit(0)),
            static_cast<std::uint8_t>(phase)};
}

std::array<Cl1Entry, 24> build_cl1_table() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Mat2 mat_h = make_mat2(inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2);
    const Mat2 mat_s = make_mat2(1.0, 0.0, 0.0, std::complex<double>(0.0, 1.0));

    struct Item {
        PauliAction ximg, zimg;
        Mat2 u;
        std::string word;
    };
    std::vector<Item> found;
    std::vector<int> seen(1 << 10, -1);

    auto key_of = [](const PauliAction& x, const PauliAction& z) {
        return (encode_action(x) << 5) | encode_action(z);
    };
    auto push = [&](const Item& it) {
        int k = key_of(it.ximg, it.zimg);
        if (seen[k] >= 0) return false;
        seen[k] = static_cast<int>(found.size());
        found.push_back(it);
        return true;
    };

    Item id{{1, 0, 0}, {0, 1, 0}, make_mat2(1.0, 0.0, 0.0, 1.0), ""};
    push(id);
    for (std::size_t head = 0; head < found.size() && found.size() < 24; ++head) {
        Item cur = found[head];
        Item byh{act_h(cur.ximg), act_h(cur.zimg), matmul(mat_h, cur.u), "H" + cur.word};
        push(byh);
        Item bys{act_s(cur.ximg), act_s(cur.zimg), matmul(mat_s, cur.u), "S" + cur.word};
        push(bys);
    }

    std::array<Cl1Entry, 24> table{};
    for (std::size_t i = 0; i < 24; ++i) {
        const Item& it = found[i];
        table[i].action[0] = {0, 0, 0};
        table[i].action[action_slot(true, false)] = it.ximg;
        table[i].action[action_slot(false, true)] = it.zimg;
        table[i].action[action_slot(true, true)] = derive_y_action(it.ximg, it.zimg);
        table[i].unitary = it.u;
        table[i].word = it.word;
    }
    return table;
}

}  // namespace

const std::array<Cl1Entry, 24>& cl1_table() {
    static const std::array<Cl1Entry, 24> table = build_cl1_table();
    return table;
}

int cl1_index_of_action(const PauliAction& x_img, const PauliAction& z_img) {
    const auto& table = cl1_table();
    for (int i = 0; i < 24; ++i) {
        const auto& xa = table[i].action[action_slot(true, false)];
        const auto& za = table[i].action[action_slot(false, true)];
        if (xa.x == x_img.x && xa.z == x_img.z && xa.phase == x_img.phase && za.x == z_img.x &&
            za.z == z_img.z && za.phase == z_img.phase)
            return i;
    }
    return -1;
}

PauliString LocalCliffordWord::conjugate(const PauliString& p) const {
    if (p.size() != idx_.size()) throw DimensionError("LocalCliffordWord::conjugate");
    const auto& table = cl1_table();
    PauliString out(p.size());
    int phase = p.phase_exponent();
    for (std::size_t q = 0; q < idx_.size(); ++q) {
        const int slot = action_slot(p.x_bit(q), p.z_bit(q));
        if (slot == 0) continue;
        const auto& a = table[idx_[q]].action[slot];
        out.set_xz(q, a.x, a.z);
        phase += a.phase;
    }
    out.set_phase_exponent(phase);
    return out;
}

std::string LocalCliffordWord::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < idx_.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(static_cast<int>(idx_[i]));
    }
    return s;
}

LocalCliffordWord LocalCliffordWord::from_string(const std::string& s) {
    std::vector<std::uint8_t> idx;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        int v = std::stoi(tok);
        if (v < 0 || v >= 24) throw ValidationError("local Clifford index out of range: " + tok);
        idx.push_back(static_cast<std::uint8_t>(v));
    }
    return LocalCliffordWord(std::move(idx));
}

LocalCliffordWord sample_local_clifford(std::size_t n, RngStream& rng) {
    std::vector<std::uint8_t> idx(n);
    for (auto& v : idx) v = static_cast<std::uint8_t>(rng.below(24));
    return LocalCliffordWord(std::move(idx));
}

StabilizerTableau StabilizerTableau::identity(std::size_t n) {
    StabilizerTableau t;
    t.n_ = n;
    t.destab_.reserve(n);
    t.stab_.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        t.destab_.push_back(PauliString::single(n, j, true, false));
        t.stab_.push_back(PauliString::single(n, j, false, true));
    }
    return t;
}

void StabilizerTableau::apply_h(std::size_t q) {
    for (auto* rows : {&destab_, &stab_}) {
        for (auto& r : *rows) {
            const bool x = r.x_bit(q), z = r.z_bit(q);
            r.set_xz(q, z, x);
            if (x && z) r.set_phase_exponent(r.phase_exponent() + 2);
        }
    }
}

void StabilizerTableau::apply_s(std::size_t q) {
    for (auto* rows : {&destab_, &stab_}) {
        for (auto& r : *rows) {
            const bool x = r.x_bit(q), z = r.z_bit(q);
            r.set_xz(q, x, x ^ z);
            if (x && z) r.set_phase_exponent(r.phase_exponent() + 2);
        }
    }
}

void StabilizerTableau::apply_sdg(std::size_t q) {
    for (auto* rows : {&destab_, &stab_}) {
        for (auto& r : *rows) {
            const bool x = r.x_bit(q), z = r.z_bit(q);
            r.set_xz(q, x, x ^ z);
            if (x && !z) r.set_phase_exponent(r.phase_exponent() + 2);
        }
    }
}

void StabilizerTableau::apply_x(std::size_t q) {
    for (auto* rows : {&destab_, &stab_})
        for (auto& r : *rows)
            if (r.z_bit(q)) r.set_phase_exponent(r.phase_exponent() + 2);
}

void StabilizerTableau::apply_z(std::size_t q) {
    for (auto* rows : {&destab_, &stab_})
        for (auto& r : *rows)
            if (r.x_bit(q)) r.set_phase_exponent(r.phase_exponent() + 2);
}

void StabilizerTableau::apply_cx(std::size_t c, std::size_t t) {
    for (auto* rows : {&destab_, &stab_}) {
        for (auto& r : *rows) {
            const bool xc = r.x_bit(c), zc = r.z_bit(c);
            const bool xt = r.x_bit(t), zt = r.z_bit(t);
            if (xc && zt && !(xt ^ zc)) r.set_phase_exponent(r.phase_exponent() + 2);
            r.set_xz(c, xc, zc ^ zt);
            r.set_xz(t, xt ^ xc, zt);
        }
    }
}

void StabilizerTableau::apply_cz(std::size_t a, std::size_t b) {
    apply_h(b);
    apply_cx(a, b);
    apply_h(b);
}

void StabilizerTableau::apply_gate(const GateOp& g) {
    switch (g.kind) {
        case GateOp::Kind::H: apply_h(g.q0); break;
        case GateOp::Kind::S: apply_s(g.q0); break;
        case GateOp::Kind::Sdg: apply_sdg(g.q0); break;
        case GateOp::Kind::X: apply_x(g.q0); break;
        case GateOp::Kind::Z: apply_z(g.q0); break;
        case GateOp::Kind::CX: apply_cx(g.q0, g.q1); break;
        case GateOp::Kind::CZ: apply_cz(g.q0, g.q1); break;
    }
}

void StabilizerTableau::apply_gates(const std::vector<GateOp>& gs) {
    for (const auto& g : gs) apply_gate(g);
}

void StabilizerTableau::apply_cl1(std::size_t q, std::uint8_t table_index) {
    const auto& entry = cl1_table()[table_index];
    for (auto* rows : {&destab_, &stab_}) {
        for (auto& r : *rows) {
            const int slot = action_slot(r.x_bit(q), r.z_bit(q));
            if (slot == 0) continue;
            const auto& a = entry.action[slot];
            r.set_xz(q, a.x, a.z);
            r.set_phase_exponent(r.phase_exponent() + a.phase);
        }
    }
}

void StabilizerTableau::apply_local_word(const LocalCliffordWord& w) {
    if (w.size() != n_) throw DimensionError("apply_local_word");
    for (std::size_t q = 0; q < n_; ++q) apply_cl1(q, w.index(q));
}

void StabilizerTableau::apply_pauli_gate(const PauliString& p) {
    if (p.size() != n_) throw DimensionError("apply_pauli_gate");
    for (auto* rows : {&destab_, &stab_}) {
        for (auto& r : *rows) {
            if (symplectic_product(p, r) & 1) r.set_phase_exponent(r.phase_exponent() + 2);
        }
    }
}

PauliString StabilizerTableau::conjugate(const PauliString& p) const {
    if (p.size() != n_) throw DimensionError("StabilizerTableau::conjugate");
    PauliString acc(n_);
    int y_count = 0;
    for (std::size_t q = 0; q < n_; ++q)
        if (p.x_bit(q) && p.z_bit(q)) ++y_count;
    acc.set_phase_exponent(p.phase_exponent() + y_count);
    for (std::size_t j = 0; j < n_; ++j)
        if (p.x_bit(j)) acc *= destab_[j];
    for (std::size_t j = 0; j < n_; ++j)
        if (p.z_bit(j)) acc *= stab_[j];
    return acc;
}

StabilizerTableau StabilizerTableau::compose(const StabilizerTableau& other) const {
    if (other.n_ != n_) throw DimensionError("StabilizerTableau::compose");
    StabilizerTableau out;
    out.n_ = n_;
    out.destab_.reserve(n_);
    out.stab_.reserve(n_);
    for (std::size_t j = 0; j < n_; ++j) out.destab_.push_back(conjugate(other.destab_[j]));
    for (std::size_t j = 0; j < n_; ++j) out.stab_.push_back(conjugate(other.stab_[j]));
    return out;
}

StabilizerTableau StabilizerTableau::sample_uniform(std::size_t n, RngStream& rng) {
    // Basis of the symplectic complement of the pairs chosen so far,
    // as bit-only Pauli strings.
    std::vector<PauliString> basis;
    basis.reserve(2 * n);
    for (std::size_t j = 0; j < n; ++j) basis.push_back(PauliString::single(n, j, true, false));
    for (std::size_t j = 0; j < n; ++j) basis.push_back(PauliString::single(n, j, false, true));

    auto xor_bits = [](PauliString& a, const PauliString& b) {
        a.ax() ^= b.ax();
        a.az() ^= b.az();
    };
    auto pair_odd = [](const PauliString& a, const PauliString& b) {
        return (symplectic_product(a, b) & 1) != 0;
    };

    StabilizerTableau t;
    t.n_ = n;
    t.destab_.reserve(n);
    t.stab_.reserve(n);

    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t m = basis.size();
        // x_j: uniform nonzero combination of the remaining basis
        PauliString x(n);
        bool nonzero = false;
        while (!nonzero) {
            x = PauliString(n);
            for (std::size_t i = 0; i < m; ++i) {
                if (rng.bit()) {
                    xor_bits(x, basis[i]);
                    nonzero = true;
                }
            }
        }
        // reduce the basis so exactly one element pairs with x
        std::size_t pivot = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (pair_odd(x, basis[i])) {
                pivot = i;
                break;
            }
        }
        for (std::size_t i = pivot + 1; i < m; ++i)
            if (pair_odd(x, basis[i])) xor_bits(basis[i], basis[pivot]);
        // z_j: pivot plus a uniform combination of the pair-free vectors
        PauliString z = basis[pivot];
        for (std::size_t i = 0; i < m; ++i) {
            if (i == pivot) continue;
            if (rng.bit()) xor_bits(z, basis[i]);
        }
        basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(pivot));
        // strip the z-pairing direction from the remaining basis
        std::size_t pivot2 = basis.size();
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (pair_odd(z, basis[i])) {
                pivot2 = i;
                break;
            }
        }
        if (pivot2 < basis.size()) {
            for (std::size_t i = pivot2 + 1; i < basis.size(); ++i)
                if (pair_odd(z, basis[i])) xor_bits(basis[i], basis[pivot2]);
            basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(pivot2));
        }
        t.destab_.push_back(std::move(x));
        t.stab_.push_back(std::move(z));
    }
    for (std::size_t j = 0; j < n; ++j) {
        t.destab_[j].set_phase_exponent(rng.bit() ? 2 : 0);
        t.stab_[j].set_phase_exponent(rng.bit() ? 2 : 0);
    }
    return t;
}

double stabilizer_probability(std::vector<PauliString> rows, const BitString& b) {
    const std::size_t n = rows.size();
    if (b.size() != n) throw DimensionError("stabilizer_probability");
    std::size_t rank = 0;
    for (std::size_t q = 0; q < n && rank < n; ++q) {
        std::size_t piv = n;
        for (std::size_t i = rank; i < n; ++i) {
            if (rows[i].x_bit(q)) {
                piv = i;
                break;
            }
        }
        if (piv == n) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i != rank && rows[i].x_bit(q)) rows[i] *= rows[rank];
        }
        ++rank;
    }
    for (std::size_t i = rank; i < n; ++i) {
        if (rows[i].expectation_zbasis(b) != 1) return 0.0;
    }
    return std::ldexp(1.0, -static_cast<int>(rank));
}

double StabilizerTableau::amplitude_probability(const BitString& b) const {
    if (b.size() != n_) throw DimensionError("amplitude_probability");
    return stabilizer_probability(stab_, b);
}

BitString StabilizerTableau::measure_all_z(RngStream& rng) {
    BitString out(n_);
    for (std::size_t q = 0; q < n_; ++q) {
        std::size_t p = n_;
        for (std::size_t i = 0; i < n_; ++i) {
            if (stab_[i].x_bit(q)) {
                p = i;
                break;
            }
        }
        const double u = rng.uniform();
        if (p < n_) {
            // outcome is a fair coin; update the tableau
            for (std::size_t i = 0; i < n_; ++i) {
                if (i != p) {
                    if (destab_[i].x_bit(q)) destab_[i] *= stab_[p];
                    if (stab_[i].x_bit(q)) stab_[i] *= stab_[p];
                }
            }
            const bool bit = u < 0.5;
            destab_[p] = stab_[p];
            PauliString zq = PauliString::single(n_, q, false, true);
            zq.set_phase_exponent(bit ? 2 : 0);
            stab_[p] = zq;
            out.set(q, bit);
        } else {
            PauliString scratch(n_);
            for (std::size_t i = 0; i < n_; ++i)
                if (destab_[i].x_bit(q)) scratch *= stab_[i];
            const double p_one = scratch.hermitian_sign() < 0 ? 1.0 : 0.0;
            out.set(q, u < p_one);
        }
    }
    return out;
}

std::vector<GateOp> StabilizerTableau::synthesize() const {
    StabilizerTableau t = *this;
    std::vector<GateOp> rec;
    auto emit = [&](GateOp g) {
        t.apply_gate(g);
        rec.push_back(g);
    };

    for (std::size_t j = 0; j < t.n_; ++j) {
        // destabilizer row j -> X_j
        {
            std::size_t k = t.n_;
            for (std::size_t q = j; q < t.n_; ++q)
                if (t.destab_[j].x_bit(q)) {
                    k = q;
                    break;
                }
            if (k == t.n_) {
                for (std::size_t q = j; q < t.n_; ++q)
                    if (t.destab_[j].z_bit(q)) {
                        k = q;
                        break;
                    }
                emit(GateOp::h(static_cast<std::uint32_t>(k)));
            }
            if (k != j) {
                emit(GateOp::cx(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k)));
                emit(GateOp::cx(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(j)));
                emit(GateOp::cx(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k)));
            }
            for (std::size_t m = 0; m < t.n_; ++m)
                if (m != j && t.destab_[j].x_bit(m))
                    emit(GateOp::cx(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(m)));
            if (t.destab_[j].z_bit(j)) emit(GateOp::s(static_cast<std::uint32_t>(j)));
            for (std::size_t m = 0; m < t.n_; ++m)
                if (m != j && t.destab_[j].z_bit(m))
                    emit(GateOp::cz(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(m)));
        }
        // stabilizer row j -> Z_j
        {
            const PauliString zj = PauliString::single(t.n_, j, false, true);
            if (!(t.stab_[j].ax() == zj.ax() && t.stab_[j].az() == zj.az())) {
                emit(GateOp::h(static_cast<std::uint32_t>(j)));
                for (std::size_t m = 0; m < t.n_; ++m)
                    if (m != j && t.stab_[j].x_bit(m))
                        emit(GateOp::cx(static_cast<std::uint32_t>(j),
                                        static_cast<std::uint32_t>(m)));
                if (t.stab_[j].z_bit(j)) emit(GateOp::s(static_cast<std::uint32_t>(j)));
                for (std::size_t m = 0; m < t.n_; ++m)
                    if (m != j && t.stab_[j].z_bit(m))
                        emit(GateOp::cz(static_cast<std::uint32_t>(j),
                                        static_cast<std::uint32_t>(m)));
                emit(GateOp::h(static_cast<std::uint32_t>(j)));
            }
        }
    }
    for (std::size_t j = 0; j < t.n_; ++j) {
        if (t.destab_[j].phase_exponent() == 2) emit(GateOp::z(static_cast<std::uint32_t>(j)));
        if (t.stab_[j].phase_exponent() == 2) emit(GateOp::x(static_cast<std::uint32_t>(j)));
    }

    std::vector<GateOp> out;
    out.reserve(rec.size());
    for (auto it = rec.rbegin(); it != rec.rend(); ++it) out.push_back(it->dagger());
    return out;
}

bool StabilizerTableau::valid() const {
    for (std::size_t i = 0; i < n_; ++i) {
        if (destab_[i].phase_exponent() & 1) return false;
        if (stab_[i].phase_exponent() & 1) return false;
        for (std::size_t j = 0; j < n_; ++j) {
            const bool anti = (symplectic_product(destab_[i], stab_[j]) & 1) != 0;
            if (anti != (i == j)) return false;
            if (symplectic_product(destab_[i], destab_[j]) & 1) return false;
            if (symplectic_product(stab_[i], stab_[j]) & 1) return false;
        }
    }
    return true;
}

std::string StabilizerTableau::to_string() const {
    std::string s;
    for (std::size_t j = 0; j < n_; ++j) {
        if (j) s += ',';
        s += destab_[j].to_label();
    }
    s += ';';
    for (std::size_t j = 0; j < n_; ++j) {
        if (j) s += ',';
        s += stab_[j].to_label();
    }
    return s;
}

StabilizerTableau StabilizerTableau::from_string(const std::string& s) {
    const auto semi = s.find(';');
    if (semi == std::string::npos) throw ValidationError("tableau string missing ';'");
    auto parse_rows = [](const std::string& part) {
        std::vector<PauliString> rows;
        std::stringstream ss(part);
        std::string tok;
        while (std::getline(ss, tok, ',')) rows.push_back(PauliString::from_label(tok));
        return rows;
    };
    StabilizerTableau t;
    t.destab_ = parse_rows(s.substr(0, semi));
    t.stab_ = parse_rows(s.substr(semi + 1));
    if (t.destab_.size() != t.stab_.size() || t.destab_.empty())
        throw ValidationError("tableau string has mismatched row counts");
    t.n_ = t.destab_.size();
    for (const auto& r : t.destab_)
        if (r.size() != t.n_) throw ValidationError("tableau row length mismatch");
    for (const auto& r : t.stab_)
        if (r.size() != t.n_) throw ValidationError("tableau row length mismatch");
    if (!t.valid()) throw ValidationError("tableau string violates commutation invariants");
    return t;
}

GroupTag group_of(const CliffordElement& e) {
    return std::holds_alternative<StabilizerTableau>(e) ? GroupTag::Global : GroupTag::Local;
}

PauliString conjugate_pauli(const CliffordElement& e, const PauliString& p) {
    if (const auto* t = std::get_if<StabilizerTableau>(&e)) return t->conjugate(p);
    return std::get<LocalCliffordWord>(e).conjugate(p);
}

std::string clifford_to_string(const CliffordElement& e) {
    if (const auto* t = std::get_if<StabilizerTableau>(&e)) return t->to_string();
    return std::get<LocalCliffordWord>(e).to_string();
}

CliffordElement clifford_from_string(GroupTag group, const std::string& s) {
    if (group == GroupTag::Global) return StabilizerTableau::from_string(s);
    return LocalCliffordWord::from_string(s);
}

}  // namespace rshadow
