#include "dsfpair/propagation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <vector>

#include "dsfpair/csv.hpp"
#include "dsfpair/units.hpp"

namespace dsfpair {

namespace {

// FFTW plan creation is not thread safe; execution with per-instance
// buffers is.
std::mutex g_fftw_mutex;

class Fft {
  public:
    explicit Fft(std::size_t n) : n_(n) {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft() {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    // In-place sum_j x_j exp(+2pi i jk/n) (unnormalized).
    void backward(std::vector<std::complex<double>>& x) { run(bwd_, x); }
    // In-place sum_j x_j exp(-2pi i jk/n) (unnormalized).
    void forward(std::vector<std::complex<double>>& x) { run(fwd_, x); }

  private:
    void run(fftw_plan plan, std::vector<std::complex<double>>& x) {
        auto* b = reinterpret_cast<std::complex<double>*>(buf_);
        std::copy(x.begin(), x.end(), b);
        fftw_execute(plan);
        std::copy(b, b + n_, x.begin());
    }

    std::size_t n_;
    fftw_complex* buf_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

// Sampled time-domain envelope on a centered grid T_j = (j - n/2) dt.
struct TimeGrid {
    std::vector<std::complex<double>> samples;
    double dt = 0.0;
};

// Nyquist margin precondition: the grid must span at least four times the
// broadened spectral half-width estimate B/t0 on each side of the carrier.
void check_nyquist_margin(const PumpPulse& pulse, const FiberSpec& fiber,
                          const PropagationConfig& cfg) {
    const double window = cfg.resolved_window(pulse);
    const double nyquist = constants::pi * static_cast<double>(cfg.n_points) / window;
    const double broadened = broadening_factor(pulse, fiber) / pulse.t0;
    if (nyquist < 4.0 * broadened)
        throw ConfigError("PropagationConfig: Nyquist range " + format_g17(nyquist) +
                          " rad/s is below 4x the broadened spectral half-width " +
                          format_g17(broadened) + " rad/s");
}

TimeGrid initial_envelope(const PumpPulse& pulse, const PropagationConfig& cfg) {
    pulse.validate();
    cfg.validate(pulse);
    const std::size_t n = cfg.n_points;
    const double window = cfg.resolved_window(pulse);
    TimeGrid g;
    g.dt = window / static_cast<double>(n);
    g.samples.resize(n);
    const double amp = std::sqrt(pulse.peak_power);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = (static_cast<double>(j) - static_cast<double>(n) / 2.0) * g.dt;
        const double x = t / pulse.t0;
        g.samples[j] = amp * std::exp(-0.5 * x * x);
    }
    return g;
}

// Converts centered time samples to the centered spectrum
// E(omega_m) = dt * sum_j E(T_j) exp(+i (omega_m - omega_c) T_j)
// with omega_m - omega_c = 2 pi (m - n/2) / (n dt). For n divisible by 4
// the phase bookkeeping reduces to alternating signs on input and output.
SpectralField to_spectral_field(const TimeGrid& g, double center_omega, Fft& fft) {
    const std::size_t n = g.samples.size();
    std::vector<std::complex<double>> work(n);
    for (std::size_t j = 0; j < n; ++j)
        work[j] = (j & 1) ? -g.samples[j] : g.samples[j];
    fft.backward(work);

    SpectralField f;
    f.center_omega = center_omega;
    f.omega_grid.resize(n);
    f.amplitude.resize(n);
    const double domega = 2.0 * constants::pi / (static_cast<double>(n) * g.dt);
    for (std::size_t m = 0; m < n; ++m) {
        const double rel = (static_cast<double>(m) - static_cast<double>(n) / 2.0) * domega;
        f.omega_grid[m] = center_omega + rel;
        const std::complex<double> v = g.dt * work[m];
        f.amplitude[m] = (m & 1) ? -v : v;
    }
    return f;
}

// Aliasing guard: relative energy in the outermost 5% of grid points
// (2.5% per edge) must stay below 1e-8.
void check_grid_energy(const SpectralField& f) {
    const std::size_t n = f.amplitude.size();
    const std::size_t edge = std::max<std::size_t>(1, n / 40);
    double total = 0.0, outer = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = std::norm(f.amplitude[k]);
        total += p;
        if (k < edge || k >= n - edge) outer += p;
    }
    if (total > 0.0 && outer > 1e-8 * total)
        throw GridError("spectral grid too narrow: " + format_g17(outer / total) +
                        " of the energy lies in the outermost 5% of the grid");
}

}  // namespace

double broadening_factor(const PumpPulse& pulse, const FiberSpec& fiber) {
    pulse.validate();
    fiber.validate();
    const double x = 0.88 * fiber.gamma * pulse.peak_power * fiber.length;
    return std::sqrt(1.0 + x * x);
}

SpectralField spm_spectrum(const PumpPulse& pulse, const FiberSpec& fiber,
                           const PropagationConfig& cfg) {
    fiber.validate();
    check_nyquist_margin(pulse, fiber, cfg);
    TimeGrid g = initial_envelope(pulse, cfg);
    const double phi_max = fiber.gamma * pulse.peak_power * fiber.length;
    for (std::size_t j = 0; j < g.samples.size(); ++j) {
        const double t = (static_cast<double>(j) - static_cast<double>(g.samples.size()) / 2.0) * g.dt;
        const double x = t / pulse.t0;
        const double phi = phi_max * std::exp(-x * x);
        g.samples[j] *= std::complex<double>(std::cos(phi), std::sin(phi));
    }
    Fft fft(cfg.n_points);
    SpectralField f = to_spectral_field(g, wavelength_to_angular_frequency(pulse.center_wavelength), fft);
    check_grid_energy(f);
    return f;
}

SpectralField split_step_propagate(const PumpPulse& pulse, const FiberSpec& fiber,
                                   const PropagationConfig& cfg) {
    fiber.validate();
    const double h = fiber.length / static_cast<double>(cfg.n_steps);
    const double step_phase = fiber.gamma * pulse.peak_power * h;
    if (!(step_phase < 0.05))
        throw ConfigError("split_step_propagate: per-step nonlinear phase " + format_g17(step_phase) +
                          " rad >= 0.05; increase n_steps");
    check_nyquist_margin(pulse, fiber, cfg);

    TimeGrid g = initial_envelope(pulse, cfg);
    const std::size_t n = g.samples.size();
    Fft fft(n);

    // Dispersion factor exp(i beta2/2 w^2 h/2) on the unshifted FFT ordering.
    std::vector<std::complex<double>> half_disp(n);
    const double domega = 2.0 * constants::pi / (static_cast<double>(n) * g.dt);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = (k < n / 2 ? static_cast<double>(k)
                                    : static_cast<double>(k) - static_cast<double>(n)) * domega;
        const double phase = 0.5 * fiber.beta2 * w * w * (0.5 * h);
        half_disp[k] = std::complex<double>(std::cos(phase), std::sin(phase));
    }
    const double inv_n = 1.0 / static_cast<double>(n);

    auto apply_half_dispersion = [&]() {
        fft.backward(g.samples);
        for (std::size_t k = 0; k < n; ++k) g.samples[k] *= half_disp[k];
        fft.forward(g.samples);
        for (auto& v : g.samples) v *= inv_n;
    };

    for (std::size_t s = 0; s < cfg.n_steps; ++s) {
        apply_half_dispersion();
        for (auto& v : g.samples) {
            const double phi = fiber.gamma * std::norm(v) * h;
            v *= std::complex<double>(std::cos(phi), std::sin(phi));
        }
        apply_half_dispersion();
    }

    SpectralField f = to_spectral_field(g, wavelength_to_angular_frequency(pulse.center_wavelength), fft);
    check_grid_energy(f);
    return f;
}

double rms_spectral_width(const SpectralField& field) {
    field.validate();
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t k = 0; k < field.amplitude.size(); ++k) {
        const double p = std::norm(field.amplitude[k]);
        m0 += p;
        m1 += p * field.omega_grid[k];
    }
    if (m0 <= 0.0) throw DomainError("rms_spectral_width: zero-energy field");
    const double mean = m1 / m0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < field.amplitude.size(); ++k) {
        const double d = field.omega_grid[k] - mean;
        m2 += std::norm(field.amplitude[k]) * d * d;
    }
    return std::sqrt(m2 / m0);
}

double beta2_from_slope(double lambda, double lambda0, double slope) {
    const double d = slope * (lambda - lambda0);
    return -d * lambda * lambda / constants::two_pi_c;
}

void write_spectrum_csv(const SpectralField& field, const std::string& path) {
    field.validate();
    CsvWriter w(path, {"omega_rad_s", "lambda_nm", "power_spectral_density_J_per_rad_s"});
    for (std::size_t k = 0; k < field.omega_grid.size(); ++k) {
        const double omega = field.omega_grid[k];
        const double lambda_nm = angular_frequency_to_wavelength(omega) * 1e9;
        const double psd = std::norm(field.amplitude[k]) / (2.0 * constants::pi);
        w.row_values({omega, lambda_nm, psd});
    }
}

}  // namespace dsfpair
