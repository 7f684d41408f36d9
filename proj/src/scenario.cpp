#include "dsfpair/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dsfpair/analysis.hpp"
#include "dsfpair/csv.hpp"
#include "dsfpair/leakage.hpp"
#include "dsfpair/propagation.hpp"
#include "dsfpair/units.hpp"

namespace dsfpair {

namespace {

constexpr const char* kVersion = "dsfpair 1.0.0";

// --- config schemas ----------------------------------------------------

const std::vector<KeySpec> kPhysicsKeys = {
    {"pump.center_wavelength_nm", KeySpec::Double, false},
    {"pump.fwhm_nm", KeySpec::Double, false},
    {"pump.t0_ps", KeySpec::Double, false},
    {"train.repetition_rate_mhz", KeySpec::Double, false},
    {"train.average_power_mw", KeySpec::Double, false},
    {"fiber.length_m", KeySpec::Double, false},
    {"fiber.gamma_per_w_km", KeySpec::Double, false},
    {"fiber.zero_dispersion_nm", KeySpec::Double, false},
    {"fiber.dispersion_slope_ps_nm2_km", KeySpec::Double, false},
    {"filter.detuning_nm", KeySpec::Double, false},
    {"filter.fwhm_nm", KeySpec::Double, false},
    {"filter.peak_transmission", KeySpec::Double, false},
    {"grid.n_points", KeySpec::Integer, false},
    {"grid.window_t0_multiple", KeySpec::Double, false},
    {"grid.n_steps", KeySpec::Integer, false},
    {"grid.use_split_step", KeySpec::Boolean, false},
};

const std::vector<KeySpec> kDetectorKeys = {
    {"detector.efficiency", KeySpec::Double, false},
    {"detector.dark_prob", KeySpec::Double, false},
    {"detector.gate_rate_hz", KeySpec::Double, false},
    {"detector.gate_decimation", KeySpec::Integer, false},
    {"detector.dead_time_us", KeySpec::Double, false},
};

const std::vector<KeySpec> kRunKeys = {
    {"run.seed", KeySpec::Integer, false},
    {"run.threads", KeySpec::Integer, false},
};

std::vector<KeySpec> cat(std::initializer_list<std::vector<KeySpec>> parts,
                         std::initializer_list<KeySpec> extra = {}) {
    std::vector<KeySpec> all;
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    all.insert(all.end(), extra.begin(), extra.end());
    return all;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_manifest(const std::string& command, const Config& cfg, const RunOptions& opts,
                    std::uint64_t seed, const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["tool"] = kVersion;
    j["command"] = command;
    j["seed"] = seed;
    j["numeric"] = opts.numeric;
    j["constants"] = {{"speed_of_light_m_per_s", constants::speed_of_light},
                      {"planck_J_s", constants::planck},
                      {"hbar_J_s", constants::hbar}};
    nlohmann::json jc = nlohmann::json::object();
    for (const auto& [k, v] : cfg.entries()) jc[k] = v;
    j["config"] = jc;
    j["outputs"] = outputs;
    std::ofstream out(join_path(opts.out_dir, "manifest.json"), std::ios::binary);
    if (!out) throw ConfigError("cannot write manifest in " + opts.out_dir);
    out << j.dump(2) << '\n';
}

std::uint64_t resolve_seed(const Config& cfg, const RunOptions& opts) {
    return opts.seed ? *opts.seed : cfg.get_u64("run.seed", 1);
}

unsigned resolve_threads(const Config& cfg, const RunOptions& opts) {
    const auto t = opts.threads ? *opts.threads
                                : static_cast<unsigned>(cfg.get_u64("run.threads", 1));
    return std::max(1u, t);
}

double tar_sigma(const CoincidenceStats& st) {
    if (st.c_a == 0 || st.c_c == 0) return std::numeric_limits<double>::quiet_NaN();
    const double cc = static_cast<double>(st.c_c), ca = static_cast<double>(st.c_a);
    return (cc / ca) * std::sqrt(1.0 / cc + 1.0 / ca);
}

}  // namespace

PhysicsSetup resolve_physics(const Config& cfg) {
    PhysicsSetup s;
    const double lambda_nm = cfg.get_double("pump.center_wavelength_nm", 1538.0);
    s.pulse.center_wavelength = lambda_nm * 1e-9;

    const bool has_fwhm = cfg.has("pump.fwhm_nm");
    const bool has_t0 = cfg.has("pump.t0_ps");
    if (has_fwhm && has_t0)
        throw ConfigError("give exactly one of pump.fwhm_nm and pump.t0_ps");
    if (has_t0) {
        s.pulse.t0 = cfg.get_double("pump.t0_ps") * 1e-12;
    } else {
        const double fwhm_nm = cfg.get_double("pump.fwhm_nm", 0.95);
        s.pulse.t0 = t0_from_sigma(s.pulse.center_wavelength, fwhm_to_sigma(fwhm_nm * 1e-9));
    }

    s.train.repetition_rate = cfg.get_double("train.repetition_rate_mhz", 41.0) * 1e6;
    s.train.average_power = cfg.get_double("train.average_power_mw", 0.0) * 1e-3;
    s.pulse.peak_power = s.train.average_power > 0.0
                             ? peak_power_from_average(s.train, s.pulse.t0)
                             : 0.0;

    s.fiber.length = cfg.get_double("fiber.length_m", 300.0);
    s.fiber.gamma = cfg.get_double("fiber.gamma_per_w_km", 2.0) * 1e-3;
    s.fiber.zero_dispersion_wavelength = cfg.get_double("fiber.zero_dispersion_nm", 1537.0) * 1e-9;
    const double slope = cfg.get_double("fiber.dispersion_slope_ps_nm2_km", 0.07)
                         * 1e-12 / (1e-9 * 1e-9 * 1e3);  // ps/(nm^2 km) -> s/m^3
    s.fiber.beta2 = beta2_from_slope(s.pulse.center_wavelength,
                                     s.fiber.zero_dispersion_wavelength, slope);

    s.detuning = cfg.get_double("filter.detuning_nm", 4.0) * 1e-9;
    s.filter_sigma = fwhm_to_sigma(cfg.get_double("filter.fwhm_nm", 0.65) * 1e-9);
    s.filter_peak_transmission = cfg.get_double("filter.peak_transmission", 1.0);

    s.grid.n_points = cfg.get_u64("grid.n_points", 1 << 14);
    const double mult = cfg.get_double("grid.window_t0_multiple", 64.0);
    s.grid.time_window = mult * s.pulse.t0;
    s.use_split_step = cfg.get_bool("grid.use_split_step", false);
    s.auto_steps = cfg.get_u64("grid.n_steps", 0) == 0;
    s.grid.n_steps = s.auto_steps ? auto_step_count(s.pulse, s.fiber)
                                  : cfg.get_u64("grid.n_steps");
    return s;
}

// Keeps the per-step nonlinear phase near 0.04 rad.
std::size_t auto_step_count(const PumpPulse& pulse, const FiberSpec& fiber) {
    const double phi = fiber.gamma * pulse.peak_power * fiber.length;
    return std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(phi / 0.04)));
}

DetectorSpec resolve_detector(const Config& cfg) {
    DetectorSpec d;
    d.efficiency = cfg.get_double("detector.efficiency", 0.02);
    d.dark_prob = cfg.get_double("detector.dark_prob", 1e-5);
    d.gate_rate = cfg.get_double("detector.gate_rate_hz", 1.29e6);
    d.gate_decimation = static_cast<std::uint32_t>(cfg.get_u64("detector.gate_decimation", 32));
    d.dead_time = cfg.get_double("detector.dead_time_us", 10.0) * 1e-6;
    d.validate();
    return d;
}

std::vector<std::string> run_propagate(const Config& cfg, const RunOptions& opts) {
    validate_schema(cfg, cat({kPhysicsKeys, kRunKeys}));
    const PhysicsSetup s = resolve_physics(cfg);
    const SpectralField field = s.use_split_step ? split_step_propagate(s.pulse, s.fiber, s.grid)
                                                 : spm_spectrum(s.pulse, s.fiber, s.grid);
    const std::string path = join_path(opts.out_dir, "spectrum.csv");
    write_spectrum_csv(field, path);
    write_manifest("propagate", cfg, opts, resolve_seed(cfg, opts), {path});
    return {path};
}

std::vector<std::string> run_min_detuning(const Config& cfg, const RunOptions& opts) {
    validate_schema(cfg, cat({kPhysicsKeys, kRunKeys},
                             {{"sweep.power_min_mw", KeySpec::Double, false},
                              {"sweep.power_max_mw", KeySpec::Double, false},
                              {"sweep.power_step_mw", KeySpec::Double, false}}));
    const PhysicsSetup base = resolve_physics(cfg);
    const double pmin = cfg.get_double("sweep.power_min_mw", 0.0);
    const double pmax = cfg.get_double("sweep.power_max_mw", 0.35);
    const double step = cfg.get_double("sweep.power_step_mw", 0.01);
    if (!(step > 0.0) || pmax < pmin) throw ConfigError("invalid min-detuning power sweep");

    // The two pump bandwidths of the reference sweep.
    const double fwhms_nm[2] = {0.95, 0.65};
    const std::string path = join_path(opts.out_dir, "min_detuning.csv");
    CsvWriter w(path, {"avg_power_mW", "min_detuning_nm_fwhm095", "min_detuning_nm_fwhm065"});
    const int n_rows = static_cast<int>(std::floor((pmax - pmin) / step + 1e-9)) + 1;
    for (int r = 0; r < n_rows; ++r) {
        const double p_mw = pmin + r * step;
        std::vector<double> row = {p_mw};
        for (double fwhm_nm : fwhms_nm) {
            PumpPulse pulse = base.pulse;
            pulse.t0 = t0_from_sigma(pulse.center_wavelength, fwhm_to_sigma(fwhm_nm * 1e-9));
            PulseTrain train = base.train;
            train.average_power = p_mw * 1e-3;
            pulse.peak_power = train.average_power > 0 ? peak_power_from_average(train, pulse.t0) : 0.0;
            PropagationConfig grid = base.grid;
            grid.time_window = (base.grid.time_window / base.pulse.t0) * pulse.t0;
            if (base.auto_steps) grid.n_steps = auto_step_count(pulse, base.fiber);
            const double det = opts.numeric
                                   ? min_detuning_numeric(pulse, base.fiber, base.filter_sigma, grid,
                                                          base.use_split_step ? SpectrumModel::SplitStep
                                                                              : SpectrumModel::SpmOnly)
                                   : min_detuning_closed_form(pulse, base.fiber, base.filter_sigma);
            row.push_back(det * 1e9);
        }
        w.row_values(row);
    }
    w.close();
    write_manifest("min-detuning", cfg, opts, resolve_seed(cfg, opts), {path});
    return {path};
}

std::vector<std::string> run_check_rejection(const Config& cfg, const RunOptions& opts) {
    validate_schema(cfg, cat({kPhysicsKeys, kRunKeys}));
    const PhysicsSetup s = resolve_physics(cfg);
    PumpPulse shape = s.pulse;
    FiberSpec medium = s.fiber;
    if (shape.peak_power == 0.0) {
        shape.peak_power = 1.0;  // rejection ratio is amplitude-invariant
        medium.gamma = 0.0;
    }
    const SpectralField field = s.use_split_step ? split_step_propagate(shape, medium, s.grid)
                                                 : spm_spectrum(shape, medium, s.grid);
    BandFilter f;
    f.center_wavelength = s.pulse.center_wavelength + s.detuning;
    f.sigma = s.filter_sigma;
    f.peak_transmission = s.filter_peak_transmission;
    const LeakageReport rep = check_rejection(field, f);

    const std::string path = join_path(opts.out_dir, "rejection.csv");
    CsvWriter w(path, {"detuning_nm", "n_pump_photons", "n_spm_band", "rejection_ratio",
                       "passes_1e_minus_10"});
    w.row({format_g17(s.detuning * 1e9), format_g17(rep.n_pump_photons),
           format_g17(rep.n_spm_band), format_g17(rep.rejection_ratio),
           rep.passes_1e_minus_10 ? "1" : "0"});
    w.close();
    write_manifest("check-rejection", cfg, opts, resolve_seed(cfg, opts), {path});
    return {path};
}

std::vector<std::string> run_simulate(const Config& cfg, const RunOptions& opts) {
    validate_schema(cfg, cat({kPhysicsKeys, kDetectorKeys, kRunKeys},
                             {{"calibration.s1_per_mw", KeySpec::Double, true},
                              {"calibration.s2_per_mw2", KeySpec::Double, true},
                              {"run.n_gates", KeySpec::Integer, true}}));
    const PhysicsSetup s = resolve_physics(cfg);
    const DetectorSpec det = resolve_detector(cfg);
    Calibration calib;
    calib.s1 = cfg.get_double("calibration.s1_per_mw") * 1e3;    // per mW -> per W
    calib.s2 = cfg.get_double("calibration.s2_per_mw2") * 1e6;   // per mW^2 -> per W^2
    const RateBreakdown rates = rates_from_physics(s.pulse, s.fiber, s.train, s.detuning,
                                                   s.filter_sigma, s.filter_peak_transmission,
                                                   s.grid, calib, s.use_split_step);
    const std::uint64_t n_gates = cfg.get_u64("run.n_gates");
    const std::uint64_t seed = resolve_seed(cfg, opts);
    const GateLedger ledger = simulate_gates(rates, det, det, n_gates, seed,
                                             resolve_threads(cfg, opts));
    const CoincidenceStats st = coincidences(ledger);

    const std::string ledger_path = join_path(opts.out_dir, "ledger.csv");
    {
        CsvWriter w(ledger_path, {"gate_index", "signal_hit", "idler_hit"});
        std::size_t a = 0, b = 0;
        for (std::uint64_t g = 0; g < ledger.n_gates; ++g) {
            const bool sh = a < ledger.signal_hits.size() && ledger.signal_hits[a] == g;
            const bool ih = b < ledger.idler_hits.size() && ledger.idler_hits[b] == g;
            if (sh) ++a;
            if (ih) ++b;
            w.row({std::to_string(g), sh ? "1" : "0", ih ? "1" : "0"});
        }
    }
    const std::string stats_path = join_path(opts.out_dir, "stats.csv");
    {
        CsvWriter w(stats_path, {"singles_s", "singles_i", "c_c", "c_a", "tar", "n_gates", "seed"});
        w.row({std::to_string(st.singles_s), std::to_string(st.singles_i), std::to_string(st.c_c),
               std::to_string(st.c_a), st.tar ? format_g17(*st.tar) : "nan",
               std::to_string(st.n_gates), std::to_string(seed)});
    }
    write_manifest("simulate", cfg, opts, seed, {ledger_path, stats_path});
    return {ledger_path, stats_path};
}

std::vector<std::string> run_tar(const Config& cfg, const RunOptions& opts) {
    validate_schema(cfg, cat({kPhysicsKeys, kDetectorKeys, kRunKeys},
                             {{"calibration.s2_per_mw2", KeySpec::Double, true},
                              {"tar.powers_mw", KeySpec::DoubleList, true},
                              {"tar.n_gates_per_point", KeySpec::DoubleList, true},
                              {"tar.detuning_a_nm", KeySpec::Double, true},
                              {"tar.detuning_b_nm", KeySpec::Double, true},
                              {"tar.s1_a_per_mw", KeySpec::Double, true},
                              {"tar.s1_b_per_mw", KeySpec::Double, true}}));
    const PhysicsSetup base = resolve_physics(cfg);
    const DetectorSpec det = resolve_detector(cfg);
    const std::vector<double> powers = cfg.get_double_list("tar.powers_mw");
    std::vector<double> gates = cfg.get_double_list("tar.n_gates_per_point");
    if (gates.size() == 1) gates.assign(powers.size(), gates[0]);
    if (gates.size() != powers.size())
        throw ConfigError("tar.n_gates_per_point must have 1 entry or one per power");
    const double s2 = cfg.get_double("calibration.s2_per_mw2") * 1e6;
    const struct { double det_nm, s1_mw; } arms[2] = {
        {cfg.get_double("tar.detuning_a_nm"), cfg.get_double("tar.s1_a_per_mw")},
        {cfg.get_double("tar.detuning_b_nm"), cfg.get_double("tar.s1_b_per_mw")},
    };
    const std::uint64_t seed = resolve_seed(cfg, opts);
    const unsigned threads = resolve_threads(cfg, opts);

    const std::string path = join_path(opts.out_dir, "tar.csv");
    CsvWriter w(path, {"avg_power_mW", "detuning_nm", "n_gates", "singles_s", "singles_i",
                       "c_c", "c_a", "tar", "tar_sigma"});
    std::uint64_t point = 0;
    for (std::size_t k = 0; k < powers.size(); ++k) {
        for (const auto& arm : arms) {
            PulseTrain train = base.train;
            train.average_power = powers[k] * 1e-3;
            PumpPulse pulse = base.pulse;
            pulse.peak_power = peak_power_from_average(train, pulse.t0);
            PropagationConfig grid = base.grid;
            if (base.auto_steps) grid.n_steps = auto_step_count(pulse, base.fiber);
            Calibration calib{arm.s1_mw * 1e3, s2};
            const RateBreakdown rates = rates_from_physics(pulse, base.fiber, train,
                                                           arm.det_nm * 1e-9, base.filter_sigma,
                                                           base.filter_peak_transmission, grid,
                                                           calib, base.use_split_step);
            // one substream per (power, detuning) point
            const std::uint64_t point_seed = derive_block_seed(seed, 0x7A500000ull + point);
            ++point;
            const GateLedger ledger = simulate_gates(rates, det, det,
                                                     static_cast<std::uint64_t>(gates[k]),
                                                     point_seed, threads);
            const CoincidenceStats st = coincidences(ledger);
            w.row({format_g17(powers[k]), format_g17(arm.det_nm), std::to_string(st.n_gates),
                   std::to_string(st.singles_s), std::to_string(st.singles_i),
                   std::to_string(st.c_c), std::to_string(st.c_a),
                   st.tar ? format_g17(*st.tar) : "nan", format_g17(tar_sigma(st))});
        }
    }
    w.close();
    write_manifest("tar", cfg, opts, seed, {path});
    return {path};
}

std::vector<std::string> run_fringe_fit(const std::string& csv_path, const RunOptions& opts) {
    const CsvTable t = read_csv(csv_path);
    FringeScan scan;
    scan.phases = t.numeric_column("phase_rad");
    scan.counts = t.numeric_column("counts");
    if (t.has_column("counts_err")) scan.counts_err = t.numeric_column("counts_err");
    const FringeFit fit = fit_fringe(scan);

    const std::string path = join_path(opts.out_dir, "fringe_fit.csv");
    CsvWriter w(path, {"baseline", "fringe_amp", "phase_offset_rad", "visibility",
                       "residual_rms", "baseline_clipped"});
    w.row({format_g17(fit.baseline), format_g17(fit.fringe_amp), format_g17(fit.phase_offset),
           format_g17(fit.visibility), format_g17(fit.residual_rms),
           fit.baseline_clipped ? "1" : "0"});
    w.close();
    return {path};
}

std::vector<std::string> run_power_fit(const std::string& csv_path, const RunOptions& opts) {
    const CsvTable t = read_csv(csv_path);
    std::vector<double> powers_mw = t.numeric_column("avg_power_mW");
    std::vector<double> baselines = t.numeric_column("baseline_counts_per_s");
    std::vector<double> errs;
    if (t.has_column("baseline_err")) errs = t.numeric_column("baseline_err");

    std::vector<double> powers_w(powers_mw.size());
    for (std::size_t k = 0; k < powers_mw.size(); ++k) powers_w[k] = powers_mw[k] * 1e-3;
    const PowerLawFit fit = fit_power_law(powers_w, baselines, errs);

    const std::string path = join_path(opts.out_dir, "power_fit.csv");
    CsvWriter w(path, {"s1_counts_per_s_per_mW", "s2_counts_per_s_per_mW2", "s1_err", "s2_err",
                       "residual_rms"});
    w.row_values({fit.s1 * 1e-3, fit.s2 * 1e-6, fit.s1_err() * 1e-3, fit.s2_err() * 1e-6,
                  fit.residual_rms});
    w.close();
    return {path};
}

std::vector<std::string> run_scenario(const std::string& command, const Config& cfg,
                                      const RunOptions& opts) {
    if (cfg.entries().empty()) throw ConfigError("empty config: no keys given");
    std::filesystem::create_directories(opts.out_dir);
    if (command == "propagate") return run_propagate(cfg, opts);
    if (command == "min-detuning") return run_min_detuning(cfg, opts);
    if (command == "check-rejection") return run_check_rejection(cfg, opts);
    if (command == "simulate") return run_simulate(cfg, opts);
    if (command == "tar") return run_tar(cfg, opts);
    throw ConfigError("unknown command: " + command);
}

}  // namespace dsfpair
