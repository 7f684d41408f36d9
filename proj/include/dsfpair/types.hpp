#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "dsfpair/constants.hpp"
#include "dsfpair/errors.hpp"

namespace dsfpair {

// Transform-limited Gaussian pump pulse. The field envelope is
// sqrt(peak_power) * exp(-T^2 / (2 t0^2)), i.e. t0 is the 1/e half-width of
// the field envelope and the instantaneous power is P exp(-T^2/t0^2).
struct PumpPulse {
    double peak_power = 0.0;         // W
    double t0 = 0.0;                 // s
    double center_wavelength = 0.0;  // m

    void validate() const {
        if (!(peak_power >= 0.0)) throw DomainError("PumpPulse: peak_power must be >= 0");
        if (!(t0 > 0.0)) throw DomainError("PumpPulse: t0 must be > 0");
        if (!(center_wavelength > 1.2e-6 && center_wavelength < 1.7e-6))
            throw DomainError("PumpPulse: center_wavelength must lie in (1.2e-6, 1.7e-6) m");
    }

    // J; integral of P exp(-T^2/t0^2) over T.
    double pulse_energy() const { return peak_power * t0 * std::sqrt(constants::pi); }
};

struct FiberSpec {
    double length = 0.0;                    // m
    double gamma = 0.0;                     // 1/(W*m)
    double zero_dispersion_wavelength = 0;  // m
    double beta2 = 0.0;                     // s^2/m, GVD at the pump wavelength (0 allowed)

    void validate() const {
        if (!(length > 0.0)) throw DomainError("FiberSpec: length must be > 0");
        if (!(gamma >= 0.0)) throw DomainError("FiberSpec: gamma must be >= 0");
    }
};

// Bandpass filter with Gaussian power transmission in the wavelength offset:
// f(lambda) = peak_transmission * exp(-(lambda - center)^2 / sigma^2).
// Frequency-domain evaluation converts offsets with the local Jacobian
// dlambda = -lambda^2/(2 pi c) domega taken at the filter center.
struct BandFilter {
    double center_wavelength = 0.0;  // m
    double sigma = 0.0;              // m, 1/e half-width of the power transmission
    double peak_transmission = 1.0;  // in (0, 1]

    void validate() const {
        if (!(sigma > 0.0)) throw DomainError("BandFilter: sigma must be > 0");
        if (!(center_wavelength > 0.0)) throw DomainError("BandFilter: center_wavelength must be > 0");
        if (!(peak_transmission > 0.0 && peak_transmission <= 1.0))
            throw DomainError("BandFilter: peak_transmission must lie in (0, 1]");
    }

    // Power transmission at angular frequency omega (rad/s).
    double transmission(double omega) const {
        const double omega_c = constants::two_pi_c / center_wavelength;
        const double dlam = -(center_wavelength * center_wavelength / constants::two_pi_c) * (omega - omega_c);
        const double x = dlam / sigma;
        return peak_transmission * std::exp(-x * x);
    }
};

struct PulseTrain {
    double repetition_rate = 0.0;  // Hz
    double average_power = 0.0;    // W

    void validate() const {
        if (!(repetition_rate > 0.0)) throw DomainError("PulseTrain: repetition_rate must be > 0");
        if (!(average_power >= 0.0)) throw DomainError("PulseTrain: average_power must be >= 0");
    }
};

// Time/frequency grid for pulse propagation.
struct PropagationConfig {
    std::size_t n_points = 1 << 14;   // power of two, >= 2^12
    double time_window = 0.0;         // s, total span; 0 = choose 64*t0 at use
    std::size_t n_steps = 128;        // split-step segments

    // Validation needs the pulse (window scales with t0).
    void validate(const PumpPulse& pulse) const {
        if (n_points < (1u << 12) || (n_points & (n_points - 1)) != 0)
            throw ConfigError("PropagationConfig: n_points must be a power of two >= 4096");
        if (n_steps < 1) throw ConfigError("PropagationConfig: n_steps must be >= 1");
        if (!(resolved_window(pulse) >= 16.0 * pulse.t0))
            throw ConfigError("PropagationConfig: time_window must be >= 16*t0");
    }

    double resolved_window(const PumpPulse& pulse) const {
        return time_window > 0.0 ? time_window : 64.0 * pulse.t0;
    }
};

// Complex field amplitude on a uniform angular-frequency grid, normalized so
// that (1/2pi) * integral |E(omega)|^2 domega equals the pulse energy in J.
struct SpectralField {
    std::vector<double> omega_grid;                // rad/s, uniform, increasing, even length
    std::vector<std::complex<double>> amplitude;   // sqrt(J*s) per grid point
    double center_omega = 0.0;                     // rad/s, carrier

    void validate() const {
        const std::size_t n = omega_grid.size();
        if (n == 0) throw DomainError("SpectralField: empty grid");
        if (n != amplitude.size()) throw DomainError("SpectralField: grid/amplitude size mismatch");
        if (n % 2 != 0) throw DomainError("SpectralField: grid length must be even");
        const double d = omega_grid[1] - omega_grid[0];
        if (!(d > 0.0)) throw DomainError("SpectralField: grid must be strictly increasing");
        for (std::size_t k = 1; k + 1 < n; ++k) {
            const double dk = omega_grid[k + 1] - omega_grid[k];
            if (std::abs(dk - d) > 1e-9 * d) throw DomainError("SpectralField: grid must be uniform");
        }
    }

    double grid_spacing() const { return omega_grid.size() > 1 ? omega_grid[1] - omega_grid[0] : 0.0; }

    // Pulse energy in J: (1/2pi) * trapezoidal integral of |E|^2 over omega.
    double energy() const {
        const std::size_t n = amplitude.size();
        if (n < 2) return 0.0;
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
            sum += w * std::norm(amplitude[k]);
        }
        return sum * grid_spacing() / (2.0 * constants::pi);
    }
};

}  // namespace dsfpair
