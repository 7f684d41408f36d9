#pragma once

#include <array>
#include <vector>

#include "dsfpair/counting.hpp"
#include "dsfpair/types.hpp"

namespace dsfpair {

// Counting rate vs relative pump phase.
struct FringeScan {
    std::vector<double> phases;      // rad
    std::vector<double> counts;      // counts/s
    std::vector<double> counts_err;  // optional per-point standard errors

    void validate() const;
};

// Result of fitting N(phi) = baseline + fringe_amp * (1 + cos(phi + phase_offset)).
// The flat part estimates N_F + N_R, the fringe amplitude estimates N_S.
struct FringeFit {
    double baseline = 0.0;       // counts/s
    double fringe_amp = 0.0;     // counts/s
    double phase_offset = 0.0;   // rad
    double visibility = 0.0;     // fringe_amp / (baseline + fringe_amp)
    double residual_rms = 0.0;   // counts/s
    bool baseline_clipped = false;  // negative recovered baseline clipped to 0
};

// Weighted least squares via the linearization
// N(phi) = A' + C cos(phi) + S sin(phi), then fringe_amp = sqrt(C^2 + S^2),
// phase_offset = atan2(-S, C), baseline = A' - fringe_amp. Weights are
// 1/err^2 when counts_err is provided, else Poissonian 1/max(count, 1).
FringeFit fit_fringe(const FringeScan& scan);

struct PowerLawFit {
    double s1 = 0.0;  // counts/s per W
    double s2 = 0.0;  // counts/s per W^2
    std::array<std::array<double, 2>, 2> covariance{};  // of (s1, s2)
    double residual_rms = 0.0;

    double s1_err() const { return covariance[0][0] > 0 ? std::sqrt(covariance[0][0]) : 0.0; }
    double s2_err() const { return covariance[1][1] > 0 ? std::sqrt(covariance[1][1]) : 0.0; }
};

// Non-negative least squares of baseline = s1 P + s2 P^2 (no constant term:
// zero scattering at zero power, dark counts subtracted upstream). Weights
// follow the same convention as fit_fringe: 1/err^2 when baseline_err is
// provided, else Poissonian 1/max(baseline, 1). The covariance is the
// chi2/dof-scaled inverse normal matrix of the unconstrained design.
PowerLawFit fit_power_law(const std::vector<double>& powers,
                          const std::vector<double>& baselines,
                          const std::vector<double>& baseline_err = {});

// Expectation-level dual-pump fringe configuration: equal-power arms with
// relative phase phi. Converts per-pulse means into counting rates with a
// single lumped detection factor, and models the attenuated-pump monitor
// with one proportionality constant.
struct FringeSetup {
    double efficiency = 0.02;       // total detection efficiency in the band
    double gate_rate = 1.29e6;      // Hz
    double n_pump_photons = 0.0;    // photons/pulse feeding the monitor
    double monitor_scale = 1e-7;    // counts/s per photon/pulse (attenuation to single-photon level)
};

struct FringeLevels {
    double n_t = 0.0;  // band counting rate, counts/s
    double n_p = 0.0;  // attenuated-pump monitor rate, counts/s
};

// n_t = N_F + N_R + N_S (1 + cos phi), n_p = K N_p (1 + cos phi); the idler
// band of `rates` is used.
FringeLevels fringe_expectation(const RateBreakdown& rates, const FringeSetup& setup, double phase);

}  // namespace dsfpair
