#include "rshadow/estimation.hpp"

#include <cmath>

#include "rshadow/oracle.hpp"
#include "rshadow/parallel.hpp"

namespace rshadow {

ObservableSpec ObservableSpec::pauli_sum(std::string id, std::size_t n,
                                         std::vector<std::pair<double, PauliString>> terms,
                                         std::size_t declared_k) {
    ObservableSpec o;
    o.kind_ = Kind::PauliSum;
    o.id_ = std::move(id);
    o.n_ = n;
    for (auto& [coeff, p] : terms) {
        if (p.size() != n) throw DimensionError("observable term size mismatch");
        coeff *= p.hermitian_sign();  // fold signs into the weights
        p.set_phase_exponent(0);
        if (declared_k != SIZE_MAX && p.weight() > declared_k)
            throw ValidationError("term weight exceeds the declared locality");
    }
    o.terms_ = std::move(terms);
    o.k_ = declared_k;
    if (o.k_ == SIZE_MAX) o.k_ = o.max_weight();
    return o;
}

ObservableSpec ObservableSpec::stabilizer_projector(std::string id, std::size_t n,
                                                    std::vector<PauliString> generators) {
    if (generators.size() != n)
        throw ValidationError("stabilizer projector needs exactly n generators");
    for (const auto& g : generators) {
        if (g.size() != n) throw DimensionError("generator size mismatch");
        g.hermitian_sign();  // throws on odd phase
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!generators[i].commutes_with(generators[j]))
                throw ValidationError("stabilizer generators must commute");
    // independence: GF(2) rank of the (ax|az) rows must be n
    std::vector<PauliString> rows = generators;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < 2 * n && rank < n; ++col) {
        const bool is_x = col < n;
        const std::size_t q = is_x ? col : col - n;
        std::size_t piv = rows.size();
        for (std::size_t i = rank; i < rows.size(); ++i) {
            if ((is_x ? rows[i].x_bit(q) : rows[i].z_bit(q))) {
                piv = i;
                break;
            }
        }
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i != rank && (is_x ? rows[i].x_bit(q) : rows[i].z_bit(q))) rows[i] *= rows[rank];
        }
        ++rank;
    }
    if (rank != n) throw ValidationError("stabilizer generators are not independent");

    ObservableSpec o;
    o.kind_ = Kind::StabilizerProjector;
    o.id_ = std::move(id);
    o.n_ = n;
    o.k_ = n;
    o.generators_ = std::move(generators);
    return o;
}

std::vector<std::pair<double, PauliString>> ObservableSpec::to_pauli_terms() const {
    if (kind_ == Kind::PauliSum) return terms_;
    if (n_ > 16) throw ValidationError("projector expansion limited to n <= 16");
    const std::size_t count = std::size_t{1} << n_;
    std::vector<std::pair<double, PauliString>> out;
    out.reserve(count);
    const double w = std::ldexp(1.0, -static_cast<int>(n_));
    for (std::size_t mask = 0; mask < count; ++mask) {
        PauliString prod = PauliString::identity(n_);
        for (std::size_t i = 0; i < n_; ++i)
            if ((mask >> i) & 1) prod *= generators_[i];
        const double coeff = w * prod.hermitian_sign();
        prod.set_phase_exponent(0);
        out.emplace_back(coeff, prod);
    }
    return out;
}

std::size_t ObservableSpec::max_weight() const {
    std::size_t k = 0;
    if (kind_ == Kind::StabilizerProjector) return n_;
    for (const auto& [c, p] : terms_) k = std::max(k, p.weight());
    return k;
}

Eigen::MatrixXcd ObservableSpec::dense() const {
    const Eigen::Index dim = Eigen::Index{1} << n_;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [c, p] : to_pauli_terms()) m += c * oracle::dense_pauli(p);
    return m;
}

PTMDiagonal standard_shadow_inverse(GroupTag group, std::size_t n,
                                    const std::vector<BitString>& patterns) {
    if (group == GroupTag::Global) return PTMDiagonal::standard_global(n).inverse();
    std::vector<BitString> zs = patterns;
    if (zs.empty()) zs = patterns_up_to_weight(n, n);
    return PTMDiagonal::standard_local(n, zs).inverse();
}

namespace {

/// Per-qubit diagonal factors <b_q| U_q P U_q^dag |b_q> for P = X, Y, Z.
struct LocalFactors {
    // factor[q][letter], letter in {0:I, 1:X, 2:Y, 3:Z}
    std::vector<std::array<int, 4>> factor;

    LocalFactors(const LocalCliffordWord& word, const BitString& b) {
        const auto& table = cl1_table();
        factor.resize(word.size());
        for (std::size_t q = 0; q < word.size(); ++q) {
            factor[q][0] = 1;
            for (int letter = 1; letter < 4; ++letter) {
                const int slot = (letter == 1) ? 1 : (letter == 2 ? 3 : 2);
                const auto& a = table[word.index(q)].action[static_cast<std::size_t>(slot)];
                if (a.x) {
                    factor[q][static_cast<std::size_t>(letter)] = 0;
                } else {
                    const int sign = (a.phase == 2) ? -1 : 1;
                    factor[q][static_cast<std::size_t>(letter)] = b.bit(q) ? -sign : sign;
                }
            }
        }
    }

    int term_value(const PauliString& p) const {
        int prod = 1;
        for (std::size_t q = 0; q < factor.size() && prod != 0; ++q) {
            const bool x = p.x_bit(q), z = p.z_bit(q);
            if (!x && !z) continue;
            const int letter = x ? (z ? 2 : 1) : 3;
            prod *= factor[q][static_cast<std::size_t>(letter)];
        }
        return prod;
    }
};

double estimate_pauli_sum_global(const std::vector<std::pair<double, PauliString>>& terms,
                                 const PTMDiagonal& minv, const StabilizerTableau& tab,
                                 const BitString& b) {
    double acc = 0.0;
    for (const auto& [coeff, p] : terms) {
        if (p.is_identity_bits()) {
            acc += coeff;
            continue;
        }
        const int v = tab.conjugate(p).expectation_zbasis(b);
        if (v != 0) acc += coeff * minv.eigenvalue(p) * v;
    }
    return acc;
}

}  // namespace

double single_round_estimate(const ObservableSpec& obs, const PTMDiagonal& minv,
                             const ShadowSample& sample) {
    if (minv.group() != group_of(sample.clifford))
        throw ValidationError("inverse-map group does not match the sample group");
    if (minv.size() != obs.size()) throw DimensionError("inverse-map size mismatch");

    if (const auto* tab = std::get_if<StabilizerTableau>(&sample.clifford)) {
        if (obs.kind() == ObservableSpec::Kind::StabilizerProjector) {
            const double dinv = std::ldexp(1.0, -static_cast<int>(obs.size()));
            std::vector<PauliString> rows;
            rows.reserve(obs.generators().size());
            for (const auto& g : obs.generators()) rows.push_back(tab->conjugate(g));
            const double overlap = stabilizer_probability(std::move(rows), sample.outcome);
            return dinv + minv.global_coefficient() * (overlap - dinv);
        }
        return estimate_pauli_sum_global(obs.terms(), minv, *tab, sample.outcome);
    }

    const auto& word = std::get<LocalCliffordWord>(sample.clifford);
    const LocalFactors factors(word, sample.outcome);
    double acc = 0.0;
    for (const auto& [coeff, p] : obs.to_pauli_terms()) {
        if (p.is_identity_bits()) {
            acc += coeff;
            continue;
        }
        const double inv_coeff = minv.eigenvalue(p);  // throws on uncovered patterns
        const int v = factors.term_value(p);
        if (v != 0) acc += coeff * inv_coeff * v;
    }
    return acc;
}

const ObservableEstimate& EstimationResult::result_for(const std::string& id,
                                                       const std::string& inversion) const {
    for (const auto& e : estimates)
        if (e.id == id && e.inversion == inversion) return e;
    throw ValidationError("no estimate for observable '" + id + "' under inversion '" +
                          inversion + "'");
}

EstimationResult estimate(const DeviceConfig& cfg, const TestState& state,
                          const std::vector<ObservableSpec>& observables,
                          const std::vector<std::pair<std::string, PTMDiagonal>>& inversions,
                          std::size_t N, std::size_t K, const EstimationOptions& opts) {
    if (N < 1 || K < 1) throw ValidationError("estimate needs N, K >= 1");
    if (inversions.empty()) throw ValidationError("estimate needs at least one inverse map");
    validate_device(cfg, state);
    const GroupTag group = inversions.front().second.group();
    for (const auto& [label, inv] : inversions)
        if (inv.group() != group)
            throw ValidationError("all inverse maps in one pass must share the group");

    const std::uint64_t R = static_cast<std::uint64_t>(N) * K;
    const std::size_t slots = observables.size() * inversions.size();
    std::vector<std::vector<double>> values(slots, std::vector<double>(R));

    parallel_rounds(R, opts.workers, [&](std::uint64_t r) {
        const ShadowSample sample = run_estimation_round(cfg, state, group, r);
        std::size_t slot = 0;
        for (const auto& obs : observables) {
            for (const auto& [label, inv] : inversions) {
                values[slot][r] = single_round_estimate(obs, inv, sample);
                ++slot;
            }
        }
    });

    EstimationResult res;
    res.N = N;
    res.K = K;
    res.R = R;
    res.seed = cfg.master_seed;
    const MoMConfig mom{N, K};
    std::size_t slot = 0;
    for (const auto& obs : observables) {
        for (const auto& [label, inv] : inversions) {
            ObservableEstimate e;
            e.id = obs.id();
            e.inversion = label;
            e.value = median_of_means(values[slot], mom);
            RngStream boot = RngStream::derive(cfg.master_seed, "bootstrap_est", slot);
            e.sigma = bootstrap_std(values[slot], mom, opts.bootstrap_B, boot);
            bool negative = false;
            if (inv.group() == GroupTag::Global) {
                negative = inv.global_coefficient() < 0.0;
            } else {
                for (const auto& [z, c] : inv.pattern_coefficients()) negative |= c < 0.0;
            }
            e.negative_coefficient = negative;
            res.estimates.push_back(std::move(e));
            ++slot;
        }
    }
    return res;
}

EstimationResult estimate(const DeviceConfig& cfg, const TestState& state,
                          const std::vector<ObservableSpec>& observables, const PTMDiagonal& minv,
                          std::size_t N, std::size_t K, const EstimationOptions& opts) {
    return estimate(cfg, state, observables, {{"rshadow", minv}}, N, K, opts);
}

}  // namespace rshadow
