#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsfpair/config.hpp"
#include "dsfpair/counting.hpp"
#include "dsfpair/types.hpp"

namespace dsfpair {

// Options shared by all CLI pipelines.
struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides run.seed
    bool numeric = false;               // quadrature instead of closed-form leakage
    std::optional<unsigned> threads;    // overrides run.threads
};

// Physics inputs resolved from a config (SI units).
struct PhysicsSetup {
    PumpPulse pulse;        // peak_power filled from the train
    PulseTrain train;
    FiberSpec fiber;
    double detuning = 0.0;  // m
    double filter_sigma = 0.0;
    double filter_peak_transmission = 1.0;
    PropagationConfig grid;
    bool use_split_step = false;
    bool auto_steps = true;  // grid.n_steps not pinned by the config
};

PhysicsSetup resolve_physics(const Config& cfg);
DetectorSpec resolve_detector(const Config& cfg);
std::size_t auto_step_count(const PumpPulse& pulse, const FiberSpec& fiber);

// Pipelines behind the CLI subcommands. Each writes its CSV outputs plus a
// run manifest into opts.out_dir and returns the paths of the files written.
std::vector<std::string> run_propagate(const Config& cfg, const RunOptions& opts);
std::vector<std::string> run_min_detuning(const Config& cfg, const RunOptions& opts);
std::vector<std::string> run_check_rejection(const Config& cfg, const RunOptions& opts);
std::vector<std::string> run_simulate(const Config& cfg, const RunOptions& opts);
std::vector<std::string> run_tar(const Config& cfg, const RunOptions& opts);
std::vector<std::string> run_fringe_fit(const std::string& csv_path, const RunOptions& opts);
std::vector<std::string> run_power_fit(const std::string& csv_path, const RunOptions& opts);

// Dispatch by subcommand name ("propagate", "min-detuning", ...).
std::vector<std::string> run_scenario(const std::string& command, const Config& cfg,
                                      const RunOptions& opts);

}  // namespace dsfpair
