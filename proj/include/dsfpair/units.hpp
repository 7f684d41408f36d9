#pragma once

#include <cmath>

#include "dsfpair/constants.hpp"
#include "dsfpair/errors.hpp"
#include "dsfpair/types.hpp"

// Unit conversions between the wavelength / frequency / duration / power
// representations used at the boundaries. All internal quantities are SI.
namespace dsfpair {

inline double wavelength_to_angular_frequency(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("wavelength_to_angular_frequency: lambda must be > 0");
    return constants::two_pi_c / lambda;
}

inline double angular_frequency_to_wavelength(double omega) {
    if (!(omega > 0.0)) throw DomainError("angular_frequency_to_wavelength: omega must be > 0");
    return constants::two_pi_c / omega;
}

// FWHM of a Gaussian power spectrum -> 1/e half-width (FWHM = 2 sqrt(ln 2) sigma).
inline double fwhm_to_sigma(double fwhm) {
    if (!(fwhm > 0.0)) throw DomainError("fwhm_to_sigma: fwhm must be > 0");
    return fwhm / (2.0 * std::sqrt(std::log(2.0)));
}

inline double sigma_to_fwhm(double sigma) {
    if (!(sigma > 0.0)) throw DomainError("sigma_to_fwhm: sigma must be > 0");
    return sigma * 2.0 * std::sqrt(std::log(2.0));
}

// 1/e half-width (in wavelength) of the pump power spectrum:
// sigma_p = lambda0^2 / (2 pi c t0).
inline double pump_sigma(const PumpPulse& pulse) {
    pulse.validate();
    return pulse.center_wavelength * pulse.center_wavelength / (constants::two_pi_c * pulse.t0);
}

// Inverse of pump_sigma: field 1/e half-duration from a spectral width.
inline double t0_from_sigma(double center_wavelength, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("t0_from_sigma: sigma must be > 0");
    return center_wavelength * center_wavelength / (constants::two_pi_c * sigma);
}

// Peak power of a Gaussian pulse train: pulse energy / (t0 sqrt(pi)), since
// integral P exp(-T^2/t0^2) dT = P t0 sqrt(pi).
inline double peak_power_from_average(const PulseTrain& train, double t0) {
    train.validate();
    if (!(t0 > 0.0)) throw DomainError("peak_power_from_average: t0 must be > 0");
    return (train.average_power / train.repetition_rate) / (t0 * std::sqrt(constants::pi));
}

inline double average_from_peak_power(double peak_power, double t0, double repetition_rate) {
    if (!(repetition_rate > 0.0)) throw DomainError("average_from_peak_power: repetition_rate must be > 0");
    return peak_power * t0 * std::sqrt(constants::pi) * repetition_rate;
}

// Photons per pulse from pulse energy at the carrier.
inline double photons_per_pulse(double pulse_energy, double center_wavelength) {
    return pulse_energy / (constants::hbar * wavelength_to_angular_frequency(center_wavelength));
}

}  // namespace dsfpair
