#include "rshadow/io.hpp"

#include <sstream>

namespace rshadow::io {

using nlohmann::json;

json noise_to_json(const NoiseSpec& spec) {
    json j;
    j["n"] = spec.size();
    const std::string& name = spec.name();
    if (name == "identity") {
        j["kind"] = "identity";
    } else if (name == "depolarizing_global" || name == "depolarizing_local") {
        j["kind"] = "depolarizing";
        j["p"] = spec.params().at(0);
        j["scope"] = (name == "depolarizing_global") ? "global" : "local";
    } else if (name == "amplitude_damping") {
        j["kind"] = "amplitude_damping";
        j["gamma"] = spec.params().at(0);
    } else if (name == "measurement_bitflip") {
        j["kind"] = "measurement_bitflip";
        j["p"] = spec.params().at(0);
    } else if (name == "x_rotation") {
        j["kind"] = "x_rotation";
        j["theta"] = spec.params().at(0);
    } else if (name == "xx_rotation") {
        j["kind"] = "xx_rotation";
        j["theta"] = spec.params().at(0);
        json pairs = json::array();
        for (const auto& [pq, u] : spec.pair_unitaries())
            pairs.push_back({pq.first, pq.second});
        j["pairs"] = pairs;
    } else {
        throw ConfigError("noise spec '" + name + "' has no file representation");
    }
    return j;
}

NoiseSpec noise_from_json(const json& j) {
    const std::size_t n = j.at("n").get<std::size_t>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") return NoiseSpec::identity(n);
    if (kind == "depolarizing") {
        const std::string scope = j.value("scope", "global");
        return NoiseSpec::depolarizing(j.at("p").get<double>(), n, scope == "global");
    }
    if (kind == "amplitude_damping")
        return NoiseSpec::amplitude_damping(j.at("gamma").get<double>(), n);
    if (kind == "measurement_bitflip")
        return NoiseSpec::measurement_bitflip(j.at("p").get<double>(), n);
    if (kind == "x_rotation") return NoiseSpec::x_rotation(j.at("theta").get<double>(), n);
    if (kind == "xx_rotation") {
        std::vector<std::pair<int, int>> pairs;
        if (j.contains("pairs")) {
            for (const auto& p : j.at("pairs")) pairs.emplace_back(p.at(0), p.at(1));
        } else {
            for (std::size_t q = 0; q + 1 < n; ++q)
                pairs.emplace_back(static_cast<int>(q), static_cast<int>(q + 1));
        }
        return NoiseSpec::xx_rotation(j.at("theta").get<double>(), pairs, n);
    }
    throw ConfigError("unknown noise kind: " + kind);
}

json state_prep_to_json(const StatePrepSpec& spec) {
    json j;
    if (spec.is_ideal()) {
        j["kind"] = "ideal";
        return j;
    }
    j["kind"] = "per_qubit";
    json qubits = json::array();
    for (const auto& r : spec.qubit_states()) {
        qubits.push_back({{"rho00_re", r(0, 0).real()},
                          {"rho01_re", r(0, 1).real()},
                          {"rho01_im", r(0, 1).imag()},
                          {"rho11_re", r(1, 1).real()}});
    }
    j["qubits"] = qubits;
    return j;
}

StatePrepSpec state_prep_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ideal") return StatePrepSpec::ideal();
    if (kind == "per_qubit_flip")
        return StatePrepSpec::per_qubit_flip(j.at("xi").get<double>(),
                                             j.at("n").get<std::size_t>());
    if (kind == "global_zero_fidelity")
        return StatePrepSpec::global_zero_fidelity(j.at("eps").get<double>(),
                                                   j.at("n").get<std::size_t>());
    if (kind == "per_qubit") {
        std::vector<Matrix2cd> rho;
        for (const auto& q : j.at("qubits")) {
            Matrix2cd r;
            const std::complex<double> off(q.at("rho01_re").get<double>(),
                                           q.at("rho01_im").get<double>());
            r << q.at("rho00_re").get<double>(), off, std::conj(off),
                q.at("rho11_re").get<double>();
            rho.push_back(r);
        }
        return StatePrepSpec::from_qubit_states(std::move(rho));
    }
    throw ConfigError("unknown state_prep kind: " + kind);
}

namespace {

json coefficient_to_json(const CoefficientEstimate& c) {
    return json{{"value", c.value}, {"sigma", c.sigma}, {"bin_means", c.bin_means}};
}

CoefficientEstimate coefficient_from_json(const json& j) {
    CoefficientEstimate c;
    c.value = j.at("value").get<double>();
    c.sigma = j.at("sigma").get<double>();
    if (j.contains("bin_means")) c.bin_means = j.at("bin_means").get<std::vector<double>>();
    return c;
}

}  // namespace

json calibration_to_json(const CalibrationEstimate& est) {
    json j;
    j["group"] = to_string(est.group);
    j["n"] = est.n;
    j["N"] = est.N;
    j["K"] = est.K;
    j["R"] = est.R;
    j["seed"] = est.seed;
    if (est.group == GroupTag::Global) {
        j["f"] = coefficient_to_json(est.f);
    } else {
        json coeffs = json::object();
        for (std::size_t i = 0; i < est.z_set.size(); ++i)
            coeffs[est.z_set[i].to_string()] = coefficient_to_json(est.f_z[i]);
        j["f_z"] = coeffs;
    }
    return j;
}

CalibrationEstimate calibration_from_json(const json& j) {
    CalibrationEstimate est;
    est.group = group_tag_from_string(j.at("group").get<std::string>());
    est.n = j.at("n").get<std::size_t>();
    est.N = j.at("N").get<std::size_t>();
    est.K = j.at("K").get<std::size_t>();
    est.R = j.at("R").get<std::uint64_t>();
    est.seed = j.value("seed", std::uint64_t{0});
    if (est.group == GroupTag::Global) {
        est.f = coefficient_from_json(j.at("f"));
    } else {
        for (const auto& [key, val] : j.at("f_z").items()) {
            est.z_set.push_back(BitString::from_string(key));
            est.f_z.push_back(coefficient_from_json(val));
        }
    }
    return est;
}

std::vector<ObservableSpec> read_observables(std::istream& in) {
    std::vector<ObservableSpec> out;
    std::size_t n = 0;
    std::string line;
    std::string id, mode;
    std::vector<std::pair<double, PauliString>> terms;
    std::vector<PauliString> generators;
    bool in_block = false;
    std::size_t lineno = 0;

    auto flush = [&] {
        if (mode == "pauli") {
            out.push_back(ObservableSpec::pauli_sum(id, n, std::move(terms)));
        } else {
            out.push_back(ObservableSpec::stabilizer_projector(id, n, std::move(generators)));
        }
        terms.clear();
        generators.clear();
        in_block = false;
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;
        if (!in_block) {
            if (tok == "n") {
                ss >> n;
            } else if (tok == "observable") {
                if (n == 0) throw ConfigError("observable file must declare n first");
                if (!(ss >> id >> mode) || (mode != "pauli" && mode != "stabilizer"))
                    throw ConfigError("line " + std::to_string(lineno) +
                                      ": expected 'observable <id> pauli|stabilizer'");
                in_block = true;
            } else {
                throw ConfigError("line " + std::to_string(lineno) + ": unexpected token " + tok);
            }
        } else if (tok == "end") {
            flush();
        } else if (mode == "pauli") {
            double coeff = 0.0;
            std::string label;
            std::istringstream ts(line);
            if (!(ts >> coeff >> label))
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": expected '<coeff> <pauli>'");
            terms.emplace_back(coeff, PauliString::from_label(label));
        } else {
            generators.push_back(PauliString::from_label(tok));
        }
    }
    if (in_block) throw ConfigError("observable file ended inside a block (missing 'end')");
    return out;
}

void write_observables(std::ostream& out, const std::vector<ObservableSpec>& observables) {
    if (observables.empty()) return;
    out << "n " << observables.front().size() << "\n";
    for (const auto& obs : observables) {
        if (obs.kind() == ObservableSpec::Kind::PauliSum) {
            out << "observable " << obs.id() << " pauli\n";
            for (const auto& [c, p] : obs.terms()) {
                std::string label = p.to_label();
                if (label.rfind('+', 0) == 0) label = label.substr(1);
                out << c << " " << label << "\n";
            }
        } else {
            out << "observable " << obs.id() << " stabilizer\n";
            for (const auto& g : obs.generators()) out << g.to_label() << "\n";
        }
        out << "end\n";
    }
}

std::vector<ShadowSample> read_sample_log(std::istream& in, GroupTag group) {
    std::vector<ShadowSample> samples;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw ConfigError("malformed sample-log line: " + line);
        ShadowSample s;
        s.round = std::stoull(line.substr(0, t1));
        s.clifford = clifford_from_string(group, line.substr(t1 + 1, t2 - t1 - 1));
        s.outcome = BitString::from_string(line.substr(t2 + 1));
        samples.push_back(std::move(s));
    }
    return samples;
}

}  // namespace rshadow::io
