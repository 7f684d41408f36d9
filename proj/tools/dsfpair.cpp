// dsfpair: photon-pair source simulator for dispersion-shifted fiber.
//
// Models SPM pump leakage into the signal/idler bands, Raman and SFWM
// counting rates, and gated coincidence detection. See README.md for the
// config schema and output formats.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "dsfpair/config.hpp"
#include "dsfpair/errors.hpp"
#include "dsfpair/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon-pair source simulator for dispersion-shifted fiber"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global flags after the subcommand name

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool numeric = false;
    app.add_option("--config", config_path, "run configuration file (key = value lines)");
    app.add_option("--out", out_dir, "output directory (created if missing)");
    auto* seed_opt = app.add_option("--seed", seed, "override run.seed");
    app.add_option("--threads", threads, "override run.threads");
    app.add_flag("--numeric", numeric, "use the quadrature leakage path instead of the closed form");

    auto* propagate = app.add_subcommand("propagate", "export the propagated pump spectrum");
    auto* min_det = app.add_subcommand("min-detuning", "minimum-detuning-vs-power sweep");
    auto* check_rej = app.add_subcommand("check-rejection", "evaluate the 1e-10 rejection criterion");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo gated counting run");
    auto* tar = app.add_subcommand("tar", "TAR vs power for a pair of detuning configurations");

    std::string fringe_csv, power_csv;
    auto* fringe_fit = app.add_subcommand("fringe-fit", "fit a phase-scan CSV (phase_rad,counts[,counts_err])");
    fringe_fit->add_option("csv", fringe_csv, "input CSV")->required();
    auto* power_fit = app.add_subcommand("power-fit",
                                         "fit a power-sweep CSV (avg_power_mW,baseline_counts_per_s[,baseline_err])");
    power_fit->add_option("csv", power_csv, "input CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        dsfpair::RunOptions opts;
        opts.out_dir = out_dir;
        opts.numeric = numeric;
        if (seed_opt->count() > 0) opts.seed = seed;
        if (threads > 0) opts.threads = threads;

        std::vector<std::string> outputs;
        if (fringe_fit->parsed()) {
            outputs = dsfpair::run_fringe_fit(fringe_csv, opts);
        } else if (power_fit->parsed()) {
            outputs = dsfpair::run_power_fit(power_csv, opts);
        } else {
            const char* command = propagate->parsed()    ? "propagate"
                                  : min_det->parsed()    ? "min-detuning"
                                  : check_rej->parsed()  ? "check-rejection"
                                  : simulate->parsed()   ? "simulate"
                                  : tar->parsed()        ? "tar"
                                                         : "";
            if (config_path.empty())
                throw dsfpair::ConfigError(std::string(command) + " requires --config <path>");
            const dsfpair::Config cfg = dsfpair::Config::from_file(config_path);
            outputs = dsfpair::run_scenario(command, cfg, opts);
        }
        for (const auto& p : outputs) std::printf("wrote %s\n", p.c_str());
        return kExitOk;
    } catch (const dsfpair::NumericError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumeric;
    } catch (const dsfpair::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const dsfpair::DomainError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
}
