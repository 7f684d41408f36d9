#pragma once

#include "dsfpair/types.hpp"

namespace dsfpair {

// Pump-rejection bookkeeping for one band filter.
struct LeakageReport {
    double n_pump_photons = 0.0;   // photons/pulse in the whole pump spectrum
    double n_spm_band = 0.0;       // photons/pulse leaking through the filter
    double rejection_ratio = 0.0;  // n_spm_band / n_pump_photons
    bool passes_1e_minus_10 = false;
};

// Photons per pulse in the pump spectrum:
// N_p = (1/2pi hbar omega_p0) integral |E(omega)|^2 domega.
double pump_photon_number(const SpectralField& field);

// Photons per pulse transmitted by the band filter:
// N_S = (1/2pi hbar omega_0) integral |E(omega)|^2 f(omega) domega.
// The filter center must lie inside the grid span.
double spm_band_photons(const SpectralField& field, const BandFilter& filter);

// Evaluates the rejection predicate N_S/N_p < 1e-10 on a propagated field.
// SPM and GVD conserve energy, so N_p computed from the output field equals
// the input-pulse photon number to the propagation unitarity tolerance.
LeakageReport check_rejection(const SpectralField& field, const BandFilter& filter);

// Closed-form minimum detuning (wavelength offset, m) for the 1e-10
// rejection criterion with the Gaussian broadened-pump approximation:
// sqrt(10 ln 10) * sqrt(sigma_p^2 [1 + (0.88 gamma P L)^2] + sigma_f^2).
double min_detuning_closed_form(const PumpPulse& pulse, const FiberSpec& fiber,
                                double sigma_filter);

enum class SpectrumModel {
    SpmOnly,    // Gaussian pulse with the analytic SPM phase
    SplitStep,  // full split-step run including fiber.beta2
};

// Smallest detuning (m, filter on the long-wavelength side) at which the
// quadrature ratio spm_band_photons/pump_photon_number drops below 1e-10.
// Bisection over [0.5 nm, 20 nm] to 1e-3 nm; throws BracketError with both
// endpoint ratios if the bracket does not straddle the threshold. At zero
// peak power the spectral shape of a unit-power, gamma = 0 pulse is used
// (the ratio is invariant under field rescaling).
double min_detuning_numeric(const PumpPulse& pulse, const FiberSpec& fiber,
                            double filter_sigma, const PropagationConfig& cfg,
                            SpectrumModel model = SpectrumModel::SpmOnly);

}  // namespace dsfpair
