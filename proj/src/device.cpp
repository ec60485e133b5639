#include "rshadow/device.hpp"

#include <cmath>

#include "rshadow/dense_ops.hpp"

namespace rshadow {

std::string to_string(Backend b) {
    return b == Backend::Dense ? "dense" : "stabilizer-stochastic";
}

Backend backend_from_string(const std::string& s) {
    if (s == "dense") return Backend::Dense;
    if (s == "stabilizer-stochastic" || s == "stochastic") return Backend::StabilizerStochastic;
    throw ValidationError("unknown backend: " + s);
}

TestState TestState::zero(std::size_t n) {
    TestState t;
    t.kind_ = Kind::Stabilizer;
    t.n_ = n;
    return t;
}

TestState TestState::ghz(std::size_t n) {
    TestState t;
    t.kind_ = Kind::Stabilizer;
    t.n_ = n;
    t.gates_.push_back(GateOp::h(0));
    for (std::size_t q = 0; q + 1 < n; ++q)
        t.gates_.push_back(GateOp::cx(static_cast<std::uint32_t>(q),
                                      static_cast<std::uint32_t>(q + 1)));
    return t;
}

TestState TestState::stabilizer_circuit(std::size_t n, std::vector<GateOp> gates) {
    TestState t;
    t.kind_ = Kind::Stabilizer;
    t.n_ = n;
    t.gates_ = std::move(gates);
    return t;
}

TestState TestState::dense_vector(Eigen::VectorXcd psi) {
    TestState t;
    t.kind_ = Kind::DenseVector;
    std::size_t n = 0;
    while ((Eigen::Index{1} << n) < psi.size()) ++n;
    if ((Eigen::Index{1} << n) != psi.size())
        throw DimensionError("dense state length must be a power of two");
    t.n_ = n;
    t.psi_ = std::move(psi);
    return t;
}

TestState TestState::dense_density(Eigen::MatrixXcd rho) {
    TestState t;
    t.kind_ = Kind::DenseDensity;
    std::size_t n = 0;
    while ((Eigen::Index{1} << n) < rho.rows()) ++n;
    if ((Eigen::Index{1} << n) != rho.rows() || rho.rows() != rho.cols())
        throw DimensionError("density matrix must be square with power-of-two dimension");
    t.n_ = n;
    t.rho_ = std::move(rho);
    return t;
}

Eigen::VectorXcd TestState::to_dense_vector() const {
    if (kind_ == Kind::DenseDensity) throw ValidationError("density state has no vector form");
    if (kind_ == Kind::DenseVector) return psi_;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_);
    psi[0] = 1.0;
    dense::apply_gates(psi, gates_, n_);
    return psi;
}

void validate_device(const DeviceConfig& cfg) {
    if (cfg.n == 0) throw ValidationError("device needs n >= 1");
    if (cfg.noise.size() != cfg.n) throw DimensionError("noise spec size != device size");
    if (!cfg.state_prep.is_ideal() && cfg.state_prep.size() != cfg.n)
        throw DimensionError("state-prep spec size != device size");
    cfg.noise.validate();
    if (cfg.backend == Backend::StabilizerStochastic) {
        if (!(cfg.noise.is_pauli_diagonal() || cfg.noise.is_classical()))
            throw ValidationError(
                "stabilizer-stochastic backend requires Pauli-diagonal or classical noise");
        if (!cfg.state_prep.is_ideal() && !cfg.state_prep.is_diagonal())
            throw ValidationError(
                "stabilizer-stochastic backend requires a diagonal state-prep spec");
    } else {
        if (cfg.n > 12) throw ValidationError("dense backend limited to n <= 12");
    }
}

void validate_device(const DeviceConfig& cfg, const TestState& state) {
    validate_device(cfg);
    if (state.size() != cfg.n) throw DimensionError("test state size != device size");
    if (cfg.backend == Backend::StabilizerStochastic && !state.is_stabilizer())
        throw ValidationError("stabilizer-stochastic backend needs a stabilizer test state");
}

namespace {

/// Snap a conditional probability to the nearest multiple of 1/2.
/// Stabilizer-state conditionals are exactly {0, 1/2, 1}; removing float
/// drift keeps the dense and stochastic backends' outcome streams identical
/// bit for bit under a shared seed.
double snap_half(double p) {
    const double scaled = p * 2.0;
    const double r = std::round(scaled);
    if (std::abs(scaled - r) < 2e-9) return r / 2.0;
    return p;
}

/// One uniform per qubit, most significant qubit first, conditioned on the
/// already-fixed prefix.
BitString sample_bits_from_probs(const Eigen::VectorXd& probs, std::size_t n, RngStream& rng) {
    BitString out(n);
    std::size_t begin = 0;
    std::size_t len = std::size_t{1} << n;
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t half = len / 2;
        double lower = 0.0, upper = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            lower += probs[static_cast<Eigen::Index>(begin + i)];
            upper += probs[static_cast<Eigen::Index>(begin + half + i)];
        }
        const double total = lower + upper;
        const double p_one = total > 0.0 ? snap_half(upper / total) : 0.0;
        const bool bit = rng.uniform() < p_one;
        out.set(q, bit);
        if (bit) begin += half;
        len = half;
    }
    return out;
}

struct RoundContext {
    const DeviceConfig& cfg;
    GroupTag group;
    RngStream rng;
};

CliffordElement sample_element(RoundContext& ctx) {
    if (ctx.group == GroupTag::Global)
        return StabilizerTableau::sample_uniform(ctx.cfg.n, ctx.rng);
    return sample_local_clifford(ctx.cfg.n, ctx.rng);
}

BitString sample_prep_bits(const DeviceConfig& cfg, RngStream& rng) {
    BitString bits(cfg.n);
    if (cfg.state_prep.is_ideal()) return bits;
    for (std::size_t q = 0; q < cfg.n; ++q)
        bits.set(q, rng.uniform() < cfg.state_prep.one_probability(q));
    return bits;
}

BitString run_stochastic(RoundContext& ctx, const TestState& state, bool with_prep,
                         const CliffordElement& elem) {
    const std::size_t n = ctx.cfg.n;
    const NoiseSpec& noise = ctx.cfg.noise;

    StabilizerTableau base = StabilizerTableau::identity(n);
    if (with_prep) {
        const BitString bits = sample_prep_bits(ctx.cfg, ctx.rng);
        for (std::size_t q = 0; q < n; ++q)
            if (bits.bit(q))
                base.stabilizer(q).set_phase_exponent(base.stabilizer(q).phase_exponent() + 2);
    } else {
        base.apply_gates(state.circuit());
    }

    StabilizerTableau st =
        std::holds_alternative<StabilizerTableau>(elem)
            ? std::get<StabilizerTableau>(elem).compose(base)
            : std::move(base);
    if (const auto* w = std::get_if<LocalCliffordWord>(&elem)) st.apply_local_word(*w);

    if (!noise.is_classical() && noise.is_pauli_diagonal()) {
        st.apply_pauli_gate(noise.sample_pauli_error(ctx.rng));
    }
    BitString b = st.measure_all_z(ctx.rng);
    if (noise.is_classical()) b = noise.apply_classical(b, ctx.rng);
    return b;
}

void apply_unitary_noise_dense(Eigen::VectorXcd& psi, const NoiseSpec& noise, std::size_t n) {
    switch (noise.kind()) {
        case NoiseSpec::Kind::LocalKraus: {
            Eigen::Matrix2cd u;
            for (std::size_t q = 0; q < n; ++q) {
                const auto& k = noise.local_kraus()[q][0];
                u = k;
                dense::apply_1q(psi, u, q, n);
            }
            break;
        }
        case NoiseSpec::Kind::PairUnitaryLayer: {
            for (const auto& [pq, u] : noise.pair_unitaries())
                dense::apply_2q(psi, u, static_cast<std::size_t>(pq.first),
                                static_cast<std::size_t>(pq.second), n);
            break;
        }
        case NoiseSpec::Kind::GlobalKraus: psi = noise.global_kraus()[0] * psi; break;
        default: break;  // identity-like kinds
    }
}

/// Exact trajectory unraveling of a product channel: one uniform per qubit,
/// branch weights are the post-application norms.  The marginal outcome
/// distribution is exactly the channel's diagonal.
void sample_local_trajectory(Eigen::VectorXcd& psi, const NoiseSpec& noise, std::size_t n,
                             RngStream& rng) {
    for (std::size_t q = 0; q < n; ++q) {
        const auto& kraus = noise.local_kraus()[q];
        const double u = rng.uniform();
        double acc = 0.0;
        Eigen::VectorXcd chosen;
        for (std::size_t t = 0; t < kraus.size(); ++t) {
            Eigen::VectorXcd cand = psi;
            dense::apply_1q(cand, kraus[t], q, n);
            const double w = cand.squaredNorm();
            acc += w;
            if (u < acc || t + 1 == kraus.size()) {
                chosen = cand / std::sqrt(std::max(w, 1e-300));
                break;
            }
        }
        psi = chosen;
    }
}

void sample_global_trajectory(Eigen::VectorXcd& psi, const NoiseSpec& noise, RngStream& rng) {
    const auto& kraus = noise.global_kraus();
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t t = 0; t < kraus.size(); ++t) {
        Eigen::VectorXcd cand = kraus[t] * psi;
        const double w = cand.squaredNorm();
        acc += w;
        if (u < acc || t + 1 == kraus.size()) {
            psi = cand / std::sqrt(std::max(w, 1e-300));
            return;
        }
    }
}

void apply_gates_density(Eigen::MatrixXcd& rho, const std::vector<GateOp>& gates, std::size_t n) {
    for (const auto& g : gates) {
        for (Eigen::Index c = 0; c < rho.cols(); ++c) {
            Eigen::VectorXcd col = rho.col(c);
            dense::apply_gate(col, g, n);
            rho.col(c) = col;
        }
        Eigen::MatrixXcd adj = rho.adjoint();
        for (Eigen::Index c = 0; c < adj.cols(); ++c) {
            Eigen::VectorXcd col = adj.col(c);
            dense::apply_gate(col, g, n);
            adj.col(c) = col;
        }
        rho = adj.adjoint();
    }
}

BitString run_dense(RoundContext& ctx, const TestState& state, bool with_prep,
                    const CliffordElement& elem) {
    const std::size_t n = ctx.cfg.n;
    const NoiseSpec& noise = ctx.cfg.noise;
    const bool density_path =
        state.is_density() || (with_prep && !ctx.cfg.state_prep.is_ideal() &&
                               !ctx.cfg.state_prep.is_diagonal());

    std::vector<GateOp> clifford_gates;
    if (const auto* t = std::get_if<StabilizerTableau>(&elem)) clifford_gates = t->synthesize();

    if (!density_path) {
        Eigen::VectorXcd psi;
        if (with_prep) {
            const BitString bits = sample_prep_bits(ctx.cfg, ctx.rng);
            psi = dense::basis_state(bits);
        } else {
            psi = state.to_dense_vector();
        }
        if (const auto* w = std::get_if<LocalCliffordWord>(&elem)) {
            for (std::size_t q = 0; q < n; ++q) {
                const auto& m = cl1_table()[w->index(q)].unitary;
                Eigen::Matrix2cd u;
                u << m[0][0], m[0][1], m[1][0], m[1][1];
                dense::apply_1q(psi, u, q, n);
            }
        } else {
            dense::apply_gates(psi, clifford_gates, n);
        }

        if (noise.is_classical()) {
            // noise applied to the measured bits below
        } else if (noise.is_pauli_diagonal()) {
            dense::apply_pauli(psi, noise.sample_pauli_error(ctx.rng));
        } else if (noise.is_unitary()) {
            apply_unitary_noise_dense(psi, noise, n);
        } else if (noise.kind() == NoiseSpec::Kind::LocalKraus) {
            sample_local_trajectory(psi, noise, n, ctx.rng);
        } else if (noise.kind() == NoiseSpec::Kind::GlobalKraus) {
            sample_global_trajectory(psi, noise, ctx.rng);
        } else {
            throw ValidationError("dense backend cannot realize this noise kind");
        }

        const Eigen::VectorXd probs = psi.cwiseAbs2();
        BitString b = sample_bits_from_probs(probs, n, ctx.rng);
        if (noise.is_classical()) b = noise.apply_classical(b, ctx.rng);
        return b;
    }

    // Density path: exact diagonal after Kraus summation.
    Eigen::MatrixXcd rho;
    if (with_prep && !ctx.cfg.state_prep.is_ideal()) {
        rho = Eigen::MatrixXcd::Identity(1, 1);
        for (std::size_t q = 0; q < n; ++q) {
            const auto& rq = ctx.cfg.state_prep.qubit_states()[q];
            Eigen::MatrixXcd next(rho.rows() * 2, rho.cols() * 2);
            for (Eigen::Index i = 0; i < rho.rows(); ++i)
                for (Eigen::Index j = 0; j < rho.cols(); ++j)
                    next.block(i * 2, j * 2, 2, 2) = rho(i, j) * rq;
            rho = next;
        }
    } else if (state.is_density()) {
        rho = state.density();
    } else {
        const Eigen::VectorXcd psi = state.to_dense_vector();
        rho = psi * psi.adjoint();
    }

    if (const auto* w = std::get_if<LocalCliffordWord>(&elem)) {
        for (std::size_t q = 0; q < n; ++q) {
            const auto& m = cl1_table()[w->index(q)].unitary;
            Eigen::Matrix2cd u;
            u << m[0][0], m[0][1], m[1][0], m[1][1];
            for (Eigen::Index c = 0; c < rho.cols(); ++c) {
                Eigen::VectorXcd col = rho.col(c);
                dense::apply_1q(col, u, q, n);
                rho.col(c) = col;
            }
            Eigen::MatrixXcd adj = rho.adjoint();
            for (Eigen::Index c = 0; c < adj.cols(); ++c) {
                Eigen::VectorXcd col = adj.col(c);
                dense::apply_1q(col, u, q, n);
                adj.col(c) = col;
            }
            rho = adj.adjoint();
        }
    } else {
        apply_gates_density(rho, clifford_gates, n);
    }

    if (!noise.is_classical()) rho = noise.apply_dense(rho);
    const Eigen::VectorXd probs = rho.diagonal().real().cwiseMax(0.0);
    BitString b = sample_bits_from_probs(probs, n, ctx.rng);
    if (noise.is_classical()) b = noise.apply_classical(b, ctx.rng);
    return b;
}

ShadowSample run_round(const DeviceConfig& cfg, const TestState& state, bool with_prep,
                       GroupTag group, std::uint64_t r, std::string_view purpose) {
    RoundContext ctx{cfg, group, RngStream::derive(cfg.master_seed, purpose, r)};
    CliffordElement elem = sample_element(ctx);
    BitString outcome = cfg.backend == Backend::StabilizerStochastic
                            ? run_stochastic(ctx, state, with_prep, elem)
                            : run_dense(ctx, state, with_prep, elem);
    return ShadowSample{r, std::move(elem), std::move(outcome)};
}

}  // namespace

ShadowSample run_calibration_round(const DeviceConfig& cfg, GroupTag group, std::uint64_t r) {
    return run_round(cfg, TestState::zero(cfg.n), true, group, r, "calibration");
}

ShadowSample run_estimation_round(const DeviceConfig& cfg, const TestState& state, GroupTag group,
                                  std::uint64_t r) {
    return run_round(cfg, state, false, group, r, "estimation");
}

}  // namespace rshadow
