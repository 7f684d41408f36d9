#include "dsfpair/leakage.hpp"

#include <cmath>

#include "dsfpair/csv.hpp"
#include "dsfpair/propagation.hpp"
#include "dsfpair/units.hpp"

namespace dsfpair {

namespace {

constexpr double kRejectionThreshold = 1e-10;
const double kSqrt10Ln10 = std::sqrt(10.0 * std::log(10.0));

}  // namespace

double pump_photon_number(const SpectralField& field) {
    field.validate();
    return field.energy() / (constants::hbar * field.center_omega);
}

double spm_band_photons(const SpectralField& field, const BandFilter& filter) {
    field.validate();
    filter.validate();
    const double omega_c = wavelength_to_angular_frequency(filter.center_wavelength);
    if (omega_c < field.omega_grid.front() || omega_c > field.omega_grid.back())
        throw DomainError("spm_band_photons: filter center lies outside the spectral grid");
    const std::size_t n = field.amplitude.size();
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
        sum += w * std::norm(field.amplitude[k]) * filter.transmission(field.omega_grid[k]);
    }
    const double integral = sum * field.grid_spacing();
    return integral / (2.0 * constants::pi * constants::hbar * omega_c);
}

LeakageReport check_rejection(const SpectralField& field, const BandFilter& filter) {
    LeakageReport r;
    r.n_pump_photons = pump_photon_number(field);
    r.n_spm_band = spm_band_photons(field, filter);
    if (r.n_pump_photons <= 0.0)
        throw DomainError("check_rejection: zero pump photon number");
    r.rejection_ratio = r.n_spm_band / r.n_pump_photons;
    r.passes_1e_minus_10 = r.rejection_ratio < kRejectionThreshold;
    return r;
}

double min_detuning_closed_form(const PumpPulse& pulse, const FiberSpec& fiber,
                                double sigma_filter) {
    if (!(sigma_filter > 0.0)) throw DomainError("min_detuning_closed_form: sigma_filter must be > 0");
    const double sp = pump_sigma(pulse);
    const double b = broadening_factor(pulse, fiber);
    return kSqrt10Ln10 * std::sqrt(sp * sp * b * b + sigma_filter * sigma_filter);
}

double min_detuning_numeric(const PumpPulse& pulse, const FiberSpec& fiber,
                            double filter_sigma, const PropagationConfig& cfg,
                            SpectrumModel model) {
    if (!(filter_sigma > 0.0)) throw DomainError("min_detuning_numeric: filter_sigma must be > 0");
    pulse.validate();
    fiber.validate();

    // The ratio is homogeneous of degree zero in the amplitude; at P = 0 use
    // a unit-power pulse with gamma = 0, which has the same spectral shape.
    PumpPulse shape = pulse;
    FiberSpec medium = fiber;
    if (pulse.peak_power == 0.0) {
        shape.peak_power = 1.0;
        medium.gamma = 0.0;
    }
    const SpectralField field = (model == SpectrumModel::SplitStep)
                                    ? split_step_propagate(shape, medium, cfg)
                                    : spm_spectrum(shape, medium, cfg);
    const double n_pump = pump_photon_number(field);

    auto ratio_at = [&](double detuning) {
        BandFilter f;
        f.center_wavelength = pulse.center_wavelength + detuning;
        f.sigma = filter_sigma;
        f.peak_transmission = 1.0;
        return spm_band_photons(field, f) / n_pump;
    };

    double lo = 0.5e-9, hi = 20.0e-9;
    const double r_lo = ratio_at(lo);
    const double r_hi = ratio_at(hi);
    if (!(r_lo >= kRejectionThreshold && r_hi < kRejectionThreshold))
        throw BracketError("min_detuning_numeric: no threshold crossing in [0.5, 20] nm; ratio(0.5 nm) = " +
                           format_g17(r_lo) + ", ratio(20 nm) = " + format_g17(r_hi));
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (ratio_at(mid) < kRejectionThreshold ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace dsfpair
