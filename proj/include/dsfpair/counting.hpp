#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dsfpair/rng.hpp"
#include "dsfpair/types.hpp"

namespace dsfpair {

// Mean photon numbers per pulse per band, before detection losses.
struct RateBreakdown {
    double mu_pair = 0.0;     // SFWM pairs/pulse (one photon in each band)
    double mu_raman_s = 0.0;  // RS photons/pulse, signal band
    double mu_raman_i = 0.0;  // RS photons/pulse, idler band
    double mu_spm_s = 0.0;    // SPM photons/pulse, signal band
    double mu_spm_i = 0.0;    // SPM photons/pulse, idler band

    void validate() const {
        if (mu_pair < 0 || mu_raman_s < 0 || mu_raman_i < 0 || mu_spm_s < 0 || mu_spm_i < 0)
            throw DomainError("RateBreakdown: negative mean photon number");
    }
};

struct DetectorSpec {
    double efficiency = 0.02;        // path + quantum efficiency
    double dark_prob = 1e-5;         // dark event probability per gate
    double gate_rate = 1.29e6;       // Hz
    std::uint32_t gate_decimation = 32;  // gates fire every Nth pump pulse
    double dead_time = 10e-6;        // s after an accepted click

    void validate() const {
        if (!(efficiency >= 0.0 && efficiency <= 1.0))
            throw DomainError("DetectorSpec: efficiency must lie in [0, 1]");
        if (!(dark_prob >= 0.0 && dark_prob <= 1.0))
            throw DomainError("DetectorSpec: dark_prob must lie in [0, 1]");
        if (!(gate_rate > 0.0)) throw DomainError("DetectorSpec: gate_rate must be > 0");
        if (!(dead_time >= 0.0)) throw DomainError("DetectorSpec: dead_time must be >= 0");
    }

    // Gates skipped after each accepted click.
    std::uint64_t dead_gates() const {
        return static_cast<std::uint64_t>(std::ceil(dead_time * gate_rate));
    }
};

// Detection record of one run; hit vectors are sorted gate indices.
struct GateLedger {
    std::uint64_t n_gates = 0;
    std::vector<std::uint32_t> signal_hits;
    std::vector<std::uint32_t> idler_hits;
    std::uint64_t rng_seed = 0;
};

struct CoincidenceStats {
    std::uint64_t singles_s = 0;
    std::uint64_t singles_i = 0;
    std::uint64_t c_c = 0;  // same-gate coincidences
    std::uint64_t c_a = 0;  // signal at g, idler at g+1
    std::optional<double> tar;  // (c_c - c_a)/c_a; unset when c_a = 0
    std::uint64_t n_gates = 0;
};

// Per-pulse photon-number samplers with the statistics of each process:
// pair-correlated thermal SFWM, independent thermal RS per band, coherent
// (Poisson) SPM per band.
class PhotonDrawKit {
  public:
    explicit PhotonDrawKit(const RateBreakdown& rates)
        : pair_(rates.mu_pair),
          raman_s_(rates.mu_raman_s),
          raman_i_(rates.mu_raman_i),
          spm_s_(rates.mu_spm_s),
          spm_i_(rates.mu_spm_i) {
        rates.validate();
    }

    // Draw order per pulse: pairs, RS signal, RS idler, SPM signal, SPM idler.
    std::pair<std::uint32_t, std::uint32_t> draw(Xoshiro256pp& rng) const {
        const std::uint32_t n_pair = pair_.draw(rng);
        const std::uint32_t n_rs = raman_s_.draw(rng);
        const std::uint32_t n_ri = raman_i_.draw(rng);
        const std::uint32_t n_ss = spm_s_.draw(rng);
        const std::uint32_t n_si = spm_i_.draw(rng);
        return {n_pair + n_rs + n_ss, n_pair + n_ri + n_si};
    }

  private:
    BoseEinsteinSampler pair_;
    BoseEinsteinSampler raman_s_;
    BoseEinsteinSampler raman_i_;
    PoissonSampler spm_s_;
    PoissonSampler spm_i_;
};

// (n_signal, n_idler) photon numbers for one pump pulse.
inline std::pair<std::uint32_t, std::uint32_t> draw_pulse_photons(const RateBreakdown& rates,
                                                                  Xoshiro256pp& rng) {
    return PhotonDrawKit(rates).draw(rng);
}

// Gated detection run. Per gate (in a fixed, documented draw order): draw
// photons, thin each band by the detector efficiency, OR with a dark event;
// afterwards a sequential pass suppresses clicks during each detector's dead
// time. Gates are simulated in fixed-size blocks with substreams derived
// from (seed, block index), so the ledger is bit-identical for a given seed
// regardless of n_threads.
GateLedger simulate_gates(const RateBreakdown& rates, const DetectorSpec& det_s,
                          const DetectorSpec& det_i, std::uint64_t n_gates,
                          std::uint64_t seed, unsigned n_threads = 1);

CoincidenceStats coincidences(const GateLedger& ledger);

// Per-band, per-pulse, pre-detection calibration of the power law
// N_R = s1 P_ave and N_F = s2 P_ave^2.
struct Calibration {
    double s1 = 0.0;  // photons/pulse per W
    double s2 = 0.0;  // photons/pulse per W^2
};

// Composes the calibrated SFWM/RS means with the SPM leakage quadrature at
// the configured detuning (signal band at lambda_p - detuning, idler band
// at lambda_p + detuning).
RateBreakdown rates_from_physics(const PumpPulse& pulse, const FiberSpec& fiber,
                                 const PulseTrain& train, double detuning,
                                 double filter_sigma, double peak_transmission,
                                 const PropagationConfig& cfg, const Calibration& calib,
                                 bool use_split_step = false);

// Running factorial moments; g2 = <n(n-1)>/<n>^2 (thermal 2, coherent 1).
struct MomentAccumulator {
    double sum_n = 0.0;
    double sum_n2 = 0.0;
    double sum_fact2 = 0.0;  // n(n-1)
    std::uint64_t count = 0;

    void add(std::uint32_t n) {
        const double x = n;
        sum_n += x;
        sum_n2 += x * x;
        sum_fact2 += x * (x - 1.0);
        ++count;
    }
    double mean() const { return count ? sum_n / static_cast<double>(count) : 0.0; }
    double variance() const {
        if (!count) return 0.0;
        const double m = mean();
        return sum_n2 / static_cast<double>(count) - m * m;
    }
    double g2() const {
        const double m = mean();
        return m > 0.0 ? (sum_fact2 / static_cast<double>(count)) / (m * m) : 0.0;
    }
};

}  // namespace dsfpair
