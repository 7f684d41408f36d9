#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsfpair/counting.hpp"
#include "dsfpair/units.hpp"

using namespace dsfpair;
using doctest::Approx;

// strict relative comparison (doctest Approx defaults to scale = 1.0)
static Approx approx(double v, double tol) { return Approx(v).epsilon(tol).scale(0.0); }

namespace {

RateBreakdown only_pairs(double mu) {
    RateBreakdown r;
    r.mu_pair = mu;
    return r;
}

DetectorSpec ideal(double eta) {
    DetectorSpec d;
    d.efficiency = eta;
    d.dark_prob = 0.0;
    d.dead_time = 0.0;
    return d;
}

// Standard error of the var/mean statistic by the delta method, using the
// analytic central moments mu2..mu4 of the target distribution.
double var_over_mean_se(double mean, double mu2, double mu3, double mu4, double n) {
    const double var_s2 = (mu4 - mu2 * mu2) / n;
    const double var_m = mu2 / n;
    const double cov = mu3 / n;
    const double t = mu2 / mean;
    const double rel2 = var_s2 / (mu2 * mu2) + var_m / (mean * mean) - 2.0 * cov / (mu2 * mean);
    return t * std::sqrt(std::max(rel2, 0.0));
}

}  // namespace

TEST_CASE("zero rates always draw zero") {
    Xoshiro256pp rng(42);
    const RateBreakdown r{};
    for (int k = 0; k < 1000; ++k) {
        const auto [ns, ni] = draw_pulse_photons(r, rng);
        CHECK(ns == 0);
        CHECK(ni == 0);
    }
}

TEST_CASE("SFWM draws are pair correlated with the right mean") {
    Xoshiro256pp rng(7);
    const RateBreakdown r = only_pairs(0.1);
    const PhotonDrawKit kit(r);
    MomentAccumulator acc;
    const std::uint64_t n = 1'000'000;
    for (std::uint64_t k = 0; k < n; ++k) {
        const auto [ns, ni] = kit.draw(rng);
        REQUIRE(ns == ni);  // pairs land in both bands
        acc.add(ns);
    }
    // Bose-Einstein: mean mu, var mu(1+mu)
    const double se = std::sqrt(0.1 * 1.1 / static_cast<double>(n));
    CHECK(std::abs(acc.mean() - 0.1) < 3.0 * se);
}

TEST_CASE("SPM band is Poisson, RS band is thermal") {
    const double mu = 0.2;
    const std::uint64_t n = 2'000'000;

    Xoshiro256pp rng(11);
    RateBreakdown spm;
    spm.mu_spm_s = mu;
    const PhotonDrawKit spm_kit(spm);
    MomentAccumulator acc_s;
    for (std::uint64_t k = 0; k < n; ++k) acc_s.add(spm_kit.draw(rng).first);
    // Poisson: var/mean = 1; central moments mu2 = mu, mu3 = mu, mu4 = mu(1+3mu)
    const double se_p = var_over_mean_se(mu, mu, mu, mu * (1.0 + 3.0 * mu), double(n));
    CHECK(std::abs(acc_s.variance() / acc_s.mean() - 1.0) < 3.0 * se_p);
    CHECK(acc_s.g2() == approx(1.0, 0.02));

    RateBreakdown raman;
    raman.mu_raman_i = mu;
    const PhotonDrawKit raman_kit(raman);
    MomentAccumulator acc_r;
    for (std::uint64_t k = 0; k < n; ++k) acc_r.add(raman_kit.draw(rng).second);
    // Bose-Einstein: var/mean = 1 + mu; central moments from the raw ones
    const double v = mu * (1.0 + mu);
    const double m2 = 2.0 * mu * mu + mu;
    const double m3 = 6.0 * mu * mu * mu + 6.0 * mu * mu + mu;
    const double m4 = 24.0 * mu * mu * mu * mu + 36.0 * mu * mu * mu + 14.0 * mu * mu + mu;
    const double c3 = m3 - 3.0 * m2 * mu + 2.0 * mu * mu * mu;
    const double c4 = m4 - 4.0 * m3 * mu + 6.0 * m2 * mu * mu - 3.0 * mu * mu * mu * mu;
    const double se_t = var_over_mean_se(mu, v, c3, c4, double(n));
    CHECK(std::abs(acc_r.variance() / acc_r.mean() - (1.0 + mu)) < 3.0 * se_t);
    CHECK(acc_r.g2() == approx(2.0, 0.05));
}

TEST_CASE("thinned singles rate matches the analytic value") {
    // P(click) = 1 - 1/(1 + eta mu) for a thermal band at eta = 0.02, mu = 0.1
    const RateBreakdown r = only_pairs(0.1);
    const std::uint64_t n = 10'000'000;
    const GateLedger led = simulate_gates(r, ideal(0.02), ideal(0.02), n, 1234, 2);
    const double expect = 1.0 - 1.0 / (1.0 + 0.02 * 0.1);
    const double se = std::sqrt(expect / static_cast<double>(n));
    CHECK(std::abs(double(led.signal_hits.size()) / double(n) - expect) < 3.0 * se);
    CHECK(std::abs(double(led.idler_hits.size()) / double(n) - expect) < 3.0 * se);
}

TEST_CASE("no efficiency and no dark events yield an empty ledger") {
    const GateLedger led = simulate_gates(only_pairs(0.5), ideal(0.0), ideal(0.0), 100000, 5);
    CHECK(led.signal_hits.empty());
    CHECK(led.idler_hits.empty());
}

TEST_CASE("ledger is bit-identical across runs and worker counts") {
    RateBreakdown r = only_pairs(0.05);
    r.mu_raman_s = r.mu_raman_i = 0.02;
    r.mu_spm_s = r.mu_spm_i = 0.01;
    DetectorSpec det = ideal(0.5);
    det.dark_prob = 1e-4;
    det.dead_time = 3.0 / det.gate_rate;  // 3 dead gates
    const GateLedger a = simulate_gates(r, det, det, 500'000, 99, 1);
    const GateLedger b = simulate_gates(r, det, det, 500'000, 99, 4);
    const GateLedger c = simulate_gates(r, det, det, 500'000, 99, 7);
    CHECK(a.signal_hits == b.signal_hits);
    CHECK(a.idler_hits == b.idler_hits);
    CHECK(a.signal_hits == c.signal_hits);
    CHECK(a.idler_hits == c.idler_hits);
    CHECK_FALSE(a.signal_hits.empty());

    const GateLedger d = simulate_gates(r, det, det, 500'000, 100, 1);
    CHECK(d.signal_hits != a.signal_hits);  // seed actually matters
}

TEST_CASE("dead time suppresses and never increases singles") {
    RateBreakdown r = only_pairs(0.3);
    std::uint64_t prev = ~0ull;
    for (double dead_gates : {0.0, 2.0, 8.0, 25.0}) {
        DetectorSpec det = ideal(0.8);
        det.dead_time = dead_gates / det.gate_rate;
        const GateLedger led = simulate_gates(r, det, det, 300'000, 17);
        CHECK(led.signal_hits.size() <= prev);
        prev = led.signal_hits.size();
        // accepted clicks honor the hold-off distance
        for (std::size_t k = 1; k < led.signal_hits.size(); ++k)
            CHECK(led.signal_hits[k] - led.signal_hits[k - 1] > det.dead_gates());
    }
}

TEST_CASE("coincidence bookkeeping on a dense ledger") {
    GateLedger led;
    led.n_gates = 100;
    for (std::uint32_t g = 0; g < 100; ++g) {
        led.signal_hits.push_back(g);
        led.idler_hits.push_back(g);
    }
    const CoincidenceStats st = coincidences(led);
    CHECK(st.c_c == 100);
    CHECK(st.c_a == 99);
    CHECK(st.singles_s == 100);
    REQUIRE(st.tar.has_value());
    CHECK(*st.tar == approx(1.0 / 99.0, 1e-12));
}

TEST_CASE("TAR is undefined without accidentals") {
    GateLedger led;
    led.n_gates = 10;
    led.signal_hits = {2, 5};
    led.idler_hits = {2, 5};
    const CoincidenceStats st = coincidences(led);
    CHECK(st.c_c == 2);
    CHECK(st.c_a == 0);
    CHECK_FALSE(st.tar.has_value());

    GateLedger tiny;
    tiny.n_gates = 1;
    CHECK_THROWS_AS(coincidences(tiny), DomainError);
}

TEST_CASE("pure SFWM TAR approaches 1/mu") {
    const GateLedger led = simulate_gates(only_pairs(0.01), ideal(1.0), ideal(1.0),
                                          10'000'000, 2024, 2);
    const CoincidenceStats st = coincidences(led);
    REQUIRE(st.tar.has_value());
    CHECK(std::abs(*st.tar - 100.0) / 100.0 < 0.10);
}

TEST_CASE("SPM photons dilute the pair correlation") {
    RateBreakdown clean = only_pairs(0.05);
    RateBreakdown noisy = clean;
    noisy.mu_spm_s = noisy.mu_spm_i = 0.2;
    const DetectorSpec det = ideal(0.5);
    const auto tar_of = [&](const RateBreakdown& r) {
        const CoincidenceStats st = coincidences(simulate_gates(r, det, det, 2'000'000, 31, 2));
        REQUIRE(st.tar.has_value());
        return *st.tar;
    };
    const double t_clean = tar_of(clean);
    const double t_noisy = tar_of(noisy);
    CHECK(t_noisy < 0.5 * t_clean);
}

TEST_CASE("rates_from_physics composes calibration and leakage") {
    PumpPulse pulse;
    pulse.t0 = 2.2010566506638547e-12;
    pulse.center_wavelength = 1538e-9;
    pulse.peak_power = 0.0;
    FiberSpec fiber;
    fiber.length = 300.0;
    fiber.gamma = 2e-3;
    fiber.zero_dispersion_wavelength = 1537e-9;
    PulseTrain train;
    train.repetition_rate = 41e6;
    PropagationConfig cfg;
    const Calibration calib{4.4419e3, 1.4e6};  // per W, per W^2
    const double sigma_f = 0.3903647828555962e-9;

    SUBCASE("zero power gives zero rates") {
        train.average_power = 0.0;
        const RateBreakdown r = rates_from_physics(pulse, fiber, train, 4e-9, sigma_f, 1.0, cfg, calib);
        CHECK(r.mu_pair == 0.0);
        CHECK(r.mu_raman_s == 0.0);
        CHECK(r.mu_spm_i == 0.0);
    }

    SUBCASE("power scaling of the polynomial terms") {
        train.average_power = 0.09e-3;
        const RateBreakdown r1 = rates_from_physics(pulse, fiber, train, 4e-9, sigma_f, 1.0, cfg, calib);
        train.average_power = 0.18e-3;
        const RateBreakdown r2 = rates_from_physics(pulse, fiber, train, 4e-9, sigma_f, 1.0, cfg, calib);
        CHECK(r2.mu_pair == approx(4.0 * r1.mu_pair, 1e-12));
        CHECK(r2.mu_raman_i == approx(2.0 * r1.mu_raman_i, 1e-12));
    }

    SUBCASE("SPM leakage at the 4 nm / 90 uW anchor") {
        train.average_power = 0.09e-3;
        const RateBreakdown r = rates_from_physics(pulse, fiber, train, 4e-9, sigma_f, 1.0, cfg, calib);
        CHECK(r.mu_spm_i == approx(0.9592520440332943, 1e-6));
        // Equal wavelength detunings sit at unequal frequency offsets, so the
        // short-wavelength (signal) band leaks less than the idler band.
        CHECK(r.mu_spm_s < r.mu_spm_i);
        CHECK(r.mu_spm_s > 0.3 * r.mu_spm_i);
    }

    SUBCASE("negative calibration is rejected") {
        train.average_power = 0.09e-3;
        CHECK_THROWS_AS(rates_from_physics(pulse, fiber, train, 4e-9, sigma_f, 1.0, cfg,
                                           Calibration{-1.0, 1.0}),
                        DomainError);
    }
}
