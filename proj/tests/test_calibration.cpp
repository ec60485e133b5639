#include "doctest.h"

#include <cmath>
#include <sstream>

#include "rshadow/calibration.hpp"
#include "rshadow/io.hpp"
#include "rshadow/oracle.hpp"

using namespace rshadow;

namespace {

DeviceConfig device_with(std::size_t n, NoiseSpec noise, std::uint64_t seed,
                         StatePrepSpec prep = StatePrepSpec::ideal()) {
    DeviceConfig cfg;
    cfg.n = n;
    cfg.noise = std::move(noise);
    cfg.state_prep = std::move(prep);
    cfg.backend = (cfg.noise.is_pauli_diagonal() || cfg.noise.is_classical())
                      ? Backend::StabilizerStochastic
                      : Backend::Dense;
    cfg.master_seed = seed;
    return cfg;
}

ShadowSample make_global_sample(std::size_t n, const std::string& tableau, const std::string& b) {
    ShadowSample s;
    s.round = 0;
    s.clifford = StabilizerTableau::from_string(tableau);
    s.outcome = BitString::from_string(b);
    (void)n;
    return s;
}

}  // namespace

TEST_SUITE("calibration") {

TEST_CASE("global single-round estimator: identity and Hadamard samples") {
    // U = I, b = 0: amplitude 1 -> estimator 1
    CHECK(noise_est_global(make_global_sample(1, "+X;+Z", "0")) == doctest::Approx(1.0));
    // U = H, b = 0: amplitude 1/2 -> (2*1/2 - 1)/1 = 0
    CHECK(noise_est_global(make_global_sample(1, "+Z;+X", "0")) == doctest::Approx(0.0));
    // group mismatch
    ShadowSample local;
    local.clifford = LocalCliffordWord::from_string("0");
    local.outcome = BitString::from_string("0");
    CHECK_THROWS_AS(noise_est_global(local), ValidationError);
    CHECK_THROWS_AS(noise_est_local(BitString::from_string("0"),
                                    make_global_sample(1, "+X;+Z", "0")),
                    ValidationError);
}

TEST_CASE("local single-round estimator: identity word") {
    ShadowSample s;
    s.clifford = LocalCliffordWord::from_string("0,0");
    s.outcome = BitString::from_string("00");
    CHECK(noise_est_local(BitString::from_string("00"), s) == doctest::Approx(1.0));
    // z = 10: <0|Z|0> = +1
    CHECK(noise_est_local(BitString::from_string("10"), s) == doctest::Approx(1.0));
    s.outcome = BitString::from_string("10");
    CHECK(noise_est_local(BitString::from_string("10"), s) == doctest::Approx(-1.0));
}

TEST_CASE("pattern batch equals naive per-pattern evaluation, n = 6, |z| <= 2") {
    const auto z_set = patterns_up_to_weight(6, 2);
    CHECK(z_set.size() == 6 + 15);
    DeviceConfig cfg = device_with(6, NoiseSpec::measurement_bitflip(0.1, 6), 3);
    for (std::uint64_t r = 0; r < 50; ++r) {
        const ShadowSample s = run_calibration_round(cfg, GroupTag::Local, r);
        const auto batch = estimate_all_patterns(s, z_set);
        for (std::size_t i = 0; i < z_set.size(); ++i)
            CHECK(batch[i] == doctest::Approx(noise_est_local(z_set[i], s)));
    }
    // empty set -> empty output
    CHECK(estimate_all_patterns(run_calibration_round(cfg, GroupTag::Local, 0), {}).empty());
}

TEST_CASE("pattern helpers") {
    CHECK(nearest_neighbor_patterns(4).size() == 4 + 3);
    CHECK(anchored_pair_patterns(5, 0).size() == 4);
    CHECK(patterns_up_to_weight(3, 3).size() == 7);
}

TEST_CASE("single round with N = K = 1 returns that round's estimator") {
    DeviceConfig cfg = device_with(2, NoiseSpec::identity(2), 17);
    const CalibrationEstimate est = calibrate(cfg, GroupTag::Global, 1, 1);
    const ShadowSample s = run_calibration_round(cfg, GroupTag::Global, 0);
    CHECK(est.f.value == doctest::Approx(noise_est_global(s)));
    CHECK(est.R == 1);
}

TEST_CASE("worker count does not change the result") {
    DeviceConfig cfg = device_with(3, NoiseSpec::depolarizing(0.15, 3, false), 19);
    CalibrationOptions serial, parallel;
    parallel.workers = 3;
    const CalibrationEstimate a = calibrate(cfg, GroupTag::Global, 200, 5, {}, serial);
    const CalibrationEstimate b = calibrate(cfg, GroupTag::Global, 200, 5, {}, parallel);
    CHECK(a.f.value == b.f.value);
    CHECK(a.f.sigma == b.f.sigma);
}

TEST_CASE("global calibration is unbiased: noiseless n = 2 gives 1/5") {
    DeviceConfig cfg = device_with(2, NoiseSpec::identity(2), 21);
    const CalibrationEstimate est = calibrate(cfg, GroupTag::Global, 10000, 10);
    CHECK(std::abs(est.f.value - 0.2) <= 4.0 * est.f.sigma);
}

TEST_CASE("global calibration under depolarizing matches (1-p)/(d+1)") {
    const double p = 0.2;
    DeviceConfig cfg = device_with(3, NoiseSpec::depolarizing(p, 3, true), 23);
    const CalibrationEstimate est = calibrate(cfg, GroupTag::Global, 20000, 5);
    CHECK(std::abs(est.f.value - (1.0 - p) / 9.0) <= 4.0 * est.f.sigma);
}

TEST_CASE("local calibration under bit-flip matches 3^-|z| (1-2p)^|z|") {
    const double p = 0.05;
    DeviceConfig cfg = device_with(4, NoiseSpec::measurement_bitflip(p, 4), 25);
    const auto z_set = patterns_up_to_weight(4, 2);
    const CalibrationEstimate est = calibrate(cfg, GroupTag::Local, 20000, 5, z_set);
    for (std::size_t i = 0; i < z_set.size(); ++i) {
        const double expect = std::pow(1.0 / 3.0, static_cast<double>(z_set[i].weight())) *
                              std::pow(1.0 - 2.0 * p, static_cast<double>(z_set[i].weight()));
        CHECK(std::abs(est.f_z[i].value - expect) <= 4.0 * est.f_z[i].sigma);
    }
}

TEST_CASE("coherent X-rotation noise is still calibrated without bias (global)") {
    const double theta = 0.35;
    const NoiseSpec noise = NoiseSpec::x_rotation(theta, 2);
    DeviceConfig cfg = device_with(2, noise, 27);
    const CalibrationEstimate est = calibrate(cfg, GroupTag::Global, 20000, 5);
    CHECK(std::abs(est.f.value - expected_f_global(noise)) <= 4.0 * est.f.sigma);
}

TEST_CASE("two-qubit XX cross-talk is calibrated without bias (local)") {
    const NoiseSpec noise = NoiseSpec::xx_rotation(0.3, {{0, 1}, {1, 2}}, 3);
    DeviceConfig cfg = device_with(3, noise, 29);
    const auto z_set = patterns_up_to_weight(3, 2);
    const CalibrationEstimate est = calibrate(cfg, GroupTag::Local, 20000, 5, z_set);
    for (std::size_t i = 0; i < z_set.size(); ++i) {
        const double expect = expected_f_local(noise, z_set[i]);
        CHECK(std::abs(est.f_z[i].value - expect) <= 4.5 * est.f_z[i].sigma);
    }
}

TEST_CASE("bin means and exact median relationship") {
    DeviceConfig cfg = device_with(2, NoiseSpec::identity(2), 31);
    const CalibrationEstimate est = calibrate(cfg, GroupTag::Global, 50, 9);
    std::vector<double> means = est.f.bin_means;
    std::sort(means.begin(), means.end());
    CHECK(est.f.value == doctest::Approx(means[4]).epsilon(1e-14));
    CHECK(est.f.bin_means.size() == 9);
}

TEST_CASE("inverse construction: values and floor guards") {
    CalibrationEstimate est;
    est.group = GroupTag::Global;
    est.n = 2;
    est.f.value = 0.2;
    est.f.sigma = 0.001;
    CHECK(build_inverse(est).global_coefficient() == doctest::Approx(5.0));
    est.f.value = 0.0;
    CHECK_THROWS_AS(build_inverse(est), NonInvertibleError);
    est.f.value = 0.005;  // below 10 sigma
    CHECK_THROWS_AS(build_inverse(est), NonInvertibleError);
    CHECK(build_inverse(est, 0.001).global_coefficient() == doctest::Approx(200.0));

    CalibrationEstimate loc;
    loc.group = GroupTag::Local;
    loc.n = 2;
    loc.z_set = {BitString::from_string("11")};
    loc.f_z.push_back({1.0 / 9.0, 0.001, {}});
    CHECK(build_inverse(loc).coefficient(BitString::from_string("11")) == doctest::Approx(9.0));
}

TEST_CASE("negative coefficients survive inversion when they clear the floor") {
    CalibrationEstimate est;
    est.group = GroupTag::Global;
    est.n = 1;
    est.f.value = -0.1;
    est.f.sigma = 0.001;
    CHECK(build_inverse(est).global_coefficient() == doctest::Approx(-10.0));
}

TEST_CASE("sample planning: frozen arithmetic for the global bound") {
    // eps = 0.1, delta = 0.05, F_Z = 0.9, n = 4:
    //   f = (16*0.9 - 1)/255, gamma = eps*f/(1+eps),
    //   N = ceil(34 * (2/225) / gamma^2), K = ceil(2 ln 40)
    const double f = (16.0 * 0.9 - 1.0) / 255.0;
    const double gamma = 0.1 * f / 1.1;
    const std::size_t expect_n =
        static_cast<std::size_t>(std::ceil(34.0 * (2.0 / 225.0) / (gamma * gamma)));
    const SamplePlan plan = plan_samples(0.1, 0.05, 0.9, GroupTag::Global, 0, 4);
    CHECK(plan.N == expect_n);
    CHECK(plan.K == 8);  // ceil(2 ln 40) = ceil(7.378)
    CHECK(plan.R == plan.N * plan.K);
    // same arithmetic via the closed form 136 ln(2/delta) (1+eps)^2 (1+1/d)^2
    // / (eps^2 (F_Z - 1/d)^2), up to the integer rounding of N and K
    const double closed = 136.0 * std::log(40.0) * 1.21 * std::pow(1.0 + 1.0 / 16, 2) /
                          (0.01 * std::pow(0.9 - 1.0 / 16, 2));
    CHECK(static_cast<double>(plan.R) == doctest::Approx(closed).epsilon(0.1));
}

TEST_CASE("sample planning: local bound and edge cases") {
    const SamplePlan plan = plan_samples(0.2, 0.05, 0.95, GroupTag::Local, 2, 8);
    const double gamma_lb = std::pow(0.9, 2.0);
    const double expect_n = 34.0 * 9.0 * std::pow(1.2 / 0.2, 2) / (gamma_lb * gamma_lb);
    CHECK(plan.N == static_cast<std::size_t>(std::ceil(expect_n)));
    CHECK(plan.K ==
          static_cast<std::size_t>(std::ceil(2.0 * (std::log(40.0) + 2.0 * std::log(8.0)))));

    // k = 0 collapses to the confidence term alone
    const SamplePlan k0 = plan_samples(0.2, 0.05, 0.95, GroupTag::Local, 0, 8);
    CHECK(k0.N == 1);

    CHECK_THROWS_AS(plan_samples(0.1, 0.05, 1.0 / 16.0, GroupTag::Global, 0, 4),
                    InfeasibleError);
    CHECK_THROWS_AS(plan_samples(0.1, 0.05, 0.5, GroupTag::Local, 2, 4), InfeasibleError);
    CHECK_THROWS_AS(plan_samples(0.0, 0.05, 0.9, GroupTag::Global, 0, 4), ValidationError);
}

TEST_CASE("sample log round trip re-derives the same coefficients") {
    DeviceConfig cfg = device_with(3, NoiseSpec::measurement_bitflip(0.1, 3), 33);
    const auto z_set = patterns_up_to_weight(3, 2);
    std::ostringstream log;
    CalibrationOptions opts;
    opts.sample_log = &log;
    const CalibrationEstimate direct = calibrate(cfg, GroupTag::Local, 500, 4, z_set, opts);

    std::istringstream in(log.str());
    const auto samples = io::read_sample_log(in, GroupTag::Local);
    REQUIRE(samples.size() == 2000);
    const CalibrationEstimate replayed =
        calibrate_from_samples(samples, GroupTag::Local, 3, 500, 4, z_set, 200, cfg.master_seed);
    for (std::size_t i = 0; i < z_set.size(); ++i) {
        CHECK(replayed.f_z[i].value == doctest::Approx(direct.f_z[i].value).epsilon(1e-14));
    }
    // a different pattern set can be derived from the same log
    const auto nn = nearest_neighbor_patterns(3);
    const CalibrationEstimate renewed =
        calibrate_from_samples(samples, GroupTag::Local, 3, 500, 4, nn, 200, cfg.master_seed);
    CHECK(renewed.f_z.size() == nn.size());
}

TEST_CASE("state-prep noise shifts the global mean into the predicted bracket") {
    const double eps_sp = 0.1;
    DeviceConfig cfg = device_with(2, NoiseSpec::identity(2), 35,
                                   StatePrepSpec::global_zero_fidelity(eps_sp, 2));
    const CalibrationEstimate est = calibrate(cfg, GroupTag::Global, 20000, 5);
    const double f = 0.2;
    // E(f_sp) = (d<0|rho|0> - 1)/(d-1) f = (4*0.9-1)/3 * 0.2
    const double predicted = (4.0 * (1.0 - eps_sp) - 1.0) / 3.0 * f;
    CHECK(std::abs(est.f.value - predicted) <= 4.0 * est.f.sigma);
    CHECK(est.f.value <= f + 4.0 * est.f.sigma);
    CHECK(est.f.value >= (1.0 - 2.0 * eps_sp) * f - 4.0 * est.f.sigma);
}

}  // TEST_SUITE
