#pragma once

#include <string>

#include "dsfpair/types.hpp"

namespace dsfpair {

// Approximate growth of the Gaussian pump's spectral width under SPM
// without dispersion: sqrt(1 + (0.88 gamma P L)^2).
double broadening_factor(const PumpPulse& pulse, const FiberSpec& fiber);

// Pump spectrum after SPM-only propagation over the fiber length:
// E(L, omega) = FT of sqrt(P) exp(-T^2/2t0^2) exp(i gamma P L exp(-T^2/t0^2)),
// normalized so (1/2pi) integral |E|^2 domega = pulse energy. beta2 is
// ignored here. Throws GridError if >1e-8 of the energy sits in the
// outermost 5% of the frequency grid (aliasing guard).
SpectralField spm_spectrum(const PumpPulse& pulse, const FiberSpec& fiber,
                           const PropagationConfig& cfg);

// Symmetric split-step integration of
//   dE/dz = -i (beta2/2) d^2E/dT^2 + i gamma |E|^2 E
// (anomalous dispersion beta2 < 0 at the pump). With beta2 = 0 this reduces
// pointwise to spm_spectrum. Throws ConfigError if the per-step nonlinear
// phase gamma P (L/n_steps) reaches 0.05 rad.
SpectralField split_step_propagate(const PumpPulse& pulse, const FiberSpec& fiber,
                                   const PropagationConfig& cfg);

// Second moment (RMS) width of the power spectrum about its centroid, rad/s.
double rms_spectral_width(const SpectralField& field);

// beta2 (s^2/m) from a dispersion slope S0 (s/m^3) around lambda0:
// D = S0 (lambda - lambda0), beta2 = -D lambda^2 / (2 pi c).
double beta2_from_slope(double lambda, double lambda0, double slope);

// CSV export: omega_rad_s,lambda_nm,power_spectral_density_J_per_rad_s.
void write_spectrum_csv(const SpectralField& field, const std::string& path);

}  // namespace dsfpair
