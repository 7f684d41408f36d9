#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dsfpair/csv.hpp"
#include "dsfpair/units.hpp"

using namespace dsfpair;
using doctest::Approx;

// strict relative comparison (doctest Approx defaults to scale = 1.0)
static Approx approx(double v, double tol) { return Approx(v).epsilon(tol).scale(0.0); }

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "dsfpair_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DSFPAIR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("min-detuning sweep emits the reference curves") {
    const fs::path dir = scratch_dir("mindet");
    write_file(dir / "run.cfg",
               "sweep.power_min_mw = 0\n"
               "sweep.power_max_mw = 0.35\n"
               "sweep.power_step_mw = 0.05\n");
    REQUIRE(run_cli("--config " + (dir / "run.cfg").string() + " --out " + dir.string() +
                    " min-detuning") == 0);

    const CsvTable t = read_csv((dir / "min_detuning.csv").string());
    REQUIRE(t.header == std::vector<std::string>{"avg_power_mW", "min_detuning_nm_fwhm095",
                                                 "min_detuning_nm_fwhm065"});
    REQUIRE(t.rows.size() == 8);
    const auto p = t.numeric_column("avg_power_mW");
    const auto d95 = t.numeric_column("min_detuning_nm_fwhm095");
    const auto d65 = t.numeric_column("min_detuning_nm_fwhm065");
    CHECK(p.front() == 0.0);
    CHECK(d95.front() == approx(3.3172106979078655, 1e-9));
    CHECK(d65.front() == approx(2.6490702332043887, 1e-9));
    for (std::size_t k = 0; k < p.size(); ++k) {
        CHECK(d95[k] > d65[k]);  // wider pump needs more detuning
        if (k) {
            CHECK(d95[k] > d95[k - 1]);
            CHECK(d65[k] > d65[k - 1]);
        }
    }
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("numeric min-detuning sweep exceeds the closed form under SPM") {
    const fs::path dir = scratch_dir("mindet_num");
    write_file(dir / "run.cfg",
               "sweep.power_min_mw = 0\n"
               "sweep.power_max_mw = 0.2\n"
               "sweep.power_step_mw = 0.2\n");
    REQUIRE(run_cli("--numeric --config " + (dir / "run.cfg").string() + " --out " + dir.string() +
                    " min-detuning") == 0);
    const CsvTable t = read_csv((dir / "min_detuning.csv").string());
    REQUIRE(t.rows.size() == 2);
    const auto d95 = t.numeric_column("min_detuning_nm_fwhm095");
    // P = 0: quadrature sits slightly below the closed form (overlap prefactor)
    CHECK(d95[0] == approx(3.3172, 0.02));
    // under SPM the true spectral wings demand far more detuning
    CHECK(d95[1] > 1.3 * 3.3172);

    // global flags are also accepted after the subcommand
    CHECK(run_cli("min-detuning --config " + (dir / "run.cfg").string() + " --out " +
                  dir.string()) == 0);
}

TEST_CASE("empty config is a usage error") {
    const fs::path dir = scratch_dir("empty");
    write_file(dir / "empty.cfg", "# nothing here\n");
    CHECK(run_cli("--config " + (dir / "empty.cfg").string() + " --out " + dir.string() +
                  " min-detuning") == 2);
}

TEST_CASE("unknown keys are a config error") {
    const fs::path dir = scratch_dir("unknown");
    write_file(dir / "bad.cfg", "pump.fwhm_nm = 0.95\npupm.center = 12\n");
    CHECK(run_cli("--config " + (dir / "bad.cfg").string() + " --out " + dir.string() +
                  " min-detuning") == 2);
}

TEST_CASE("missing config path is a usage error") {
    const fs::path dir = scratch_dir("noconfig");
    CHECK(run_cli("--out " + dir.string() + " simulate") == 2);
}

TEST_CASE("numeric bracket failure maps to exit code 3") {
    const fs::path dir = scratch_dir("bracket");
    write_file(dir / "run.cfg",
               "filter.fwhm_nm = 9.0\n"
               "sweep.power_min_mw = 0\n"
               "sweep.power_max_mw = 0.1\n"
               "sweep.power_step_mw = 0.1\n");
    CHECK(run_cli("--numeric --config " + (dir / "run.cfg").string() + " --out " + dir.string() +
                  " min-detuning") == 3);
}

TEST_CASE("simulate writes a consistent ledger and stats pair") {
    const fs::path dir = scratch_dir("simulate");
    write_file(dir / "run.cfg",
               "train.average_power_mw = 0.19\n"
               "filter.detuning_nm = 4.4\n"
               "fiber.gamma_per_w_km = 1.0\n"
               "calibration.s1_per_mw = 0.5\n"
               "calibration.s2_per_mw2 = 3.0\n"
               "detector.dark_prob = 0.0001\n"
               "run.n_gates = 20000\n"
               "run.seed = 7\n");
    REQUIRE(run_cli("--config " + (dir / "run.cfg").string() + " --out " + dir.string() +
                    " simulate") == 0);

    const CsvTable stats = read_csv((dir / "stats.csv").string());
    REQUIRE(stats.header == std::vector<std::string>{"singles_s", "singles_i", "c_c", "c_a",
                                                     "tar", "n_gates", "seed"});
    REQUIRE(stats.rows.size() == 1);
    CHECK(stats.rows[0][5] == "20000");
    CHECK(stats.rows[0][6] == "7");

    const CsvTable ledger = read_csv((dir / "ledger.csv").string());
    REQUIRE(ledger.rows.size() == 20000);
    std::uint64_t s = 0, i = 0, cc = 0;
    bool prev_s = false;
    std::uint64_t ca = 0;
    for (std::size_t g = 0; g < ledger.rows.size(); ++g) {
        const bool sh = ledger.rows[g][1] == "1";
        const bool ih = ledger.rows[g][2] == "1";
        s += sh;
        i += ih;
        cc += sh && ih;
        if (g > 0 && prev_s && ih) ++ca;
        prev_s = sh;
    }
    CHECK(std::to_string(s) == stats.rows[0][0]);
    CHECK(std::to_string(i) == stats.rows[0][1]);
    CHECK(std::to_string(cc) == stats.rows[0][2]);
    CHECK(std::to_string(ca) == stats.rows[0][3]);
}

TEST_CASE("simulate output is byte-identical across worker counts") {
    const fs::path d1 = scratch_dir("det1");
    const fs::path d2 = scratch_dir("det2");
    const std::string cfg =
        "train.average_power_mw = 0.12\n"
        "filter.detuning_nm = 4.4\n"
        "fiber.gamma_per_w_km = 1.0\n"
        "calibration.s1_per_mw = 0.5\n"
        "calibration.s2_per_mw2 = 3.0\n"
        "run.n_gates = 150000\n"
        "run.seed = 4242\n";
    write_file(d1 / "run.cfg", cfg);
    REQUIRE(run_cli("--config " + (d1 / "run.cfg").string() + " --out " + d1.string() +
                    " --threads 1 simulate") == 0);
    REQUIRE(run_cli("--config " + (d1 / "run.cfg").string() + " --out " + d2.string() +
                    " --threads 4 simulate") == 0);
    CHECK(slurp(d1 / "ledger.csv") == slurp(d2 / "ledger.csv"));
    CHECK(slurp(d1 / "stats.csv") == slurp(d2 / "stats.csv"));
    CHECK_FALSE(slurp(d1 / "ledger.csv").empty());
}

TEST_CASE("fringe-fit recovers model parameters from CSV input") {
    const fs::path dir = scratch_dir("fringe");
    std::ostringstream csv;
    csv << "phase_rad,counts,counts_err\n";
    for (int k = 0; k < 20; ++k) {
        const double phi = 1.9 * constants::pi * k / 19.0;
        const double y = 300.0 + 700.0 * (1.0 + std::cos(phi + 0.3));
        csv << format_g17(phi) << ',' << format_g17(y) << ',' << format_g17(10.0) << '\n';
    }
    write_file(dir / "scan.csv", csv.str());
    REQUIRE(run_cli("--out " + dir.string() + " fringe-fit " + (dir / "scan.csv").string()) == 0);
    const CsvTable t = read_csv((dir / "fringe_fit.csv").string());
    CHECK(t.numeric_column("baseline")[0] == approx(300.0, 1e-9));
    CHECK(t.numeric_column("fringe_amp")[0] == approx(700.0, 1e-9));
    CHECK(t.numeric_column("phase_offset_rad")[0] == approx(0.3, 1e-9));
    CHECK(t.numeric_column("visibility")[0] == approx(0.7, 1e-9));
}

TEST_CASE("power-fit recovers per-mW coefficients") {
    const fs::path dir = scratch_dir("power");
    std::ostringstream csv;
    csv << "avg_power_mW,baseline_counts_per_s\n";
    for (int k = 0; k < 8; ++k) {
        const double p = 0.02 + 0.04 * k;
        csv << format_g17(p) << ',' << format_g17(10.0 * p + 400.0 * p * p) << '\n';
    }
    write_file(dir / "sweep.csv", csv.str());
    REQUIRE(run_cli("--out " + dir.string() + " power-fit " + (dir / "sweep.csv").string()) == 0);
    const CsvTable t = read_csv((dir / "power_fit.csv").string());
    CHECK(t.numeric_column("s1_counts_per_s_per_mW")[0] == approx(10.0, 1e-9));
    CHECK(t.numeric_column("s2_counts_per_s_per_mW2")[0] == approx(400.0, 1e-9));
}

TEST_CASE("check-rejection separates clean and leaky detunings") {
    const fs::path dir = scratch_dir("reject");
    write_file(dir / "pass.cfg", "filter.detuning_nm = 3.6\ntrain.average_power_mw = 0\n");
    REQUIRE(run_cli("--config " + (dir / "pass.cfg").string() + " --out " + dir.string() +
                    " check-rejection") == 0);
    CsvTable t = read_csv((dir / "rejection.csv").string());
    CHECK(t.rows[0][4] == "1");
    CHECK(t.numeric_column("rejection_ratio")[0] < 1e-10);

    write_file(dir / "fail.cfg", "filter.detuning_nm = 3.2\ntrain.average_power_mw = 0\n");
    REQUIRE(run_cli("--config " + (dir / "fail.cfg").string() + " --out " + dir.string() +
                    " check-rejection") == 0);
    t = read_csv((dir / "rejection.csv").string());
    CHECK(t.rows[0][4] == "0");
    CHECK(t.numeric_column("rejection_ratio")[0] > 1e-10);
}

TEST_CASE("propagate exports a normalized spectral density") {
    const fs::path dir = scratch_dir("propagate");
    write_file(dir / "run.cfg", "train.average_power_mw = 0.19\n");
    REQUIRE(run_cli("--config " + (dir / "run.cfg").string() + " --out " + dir.string() +
                    " propagate") == 0);
    const CsvTable t = read_csv((dir / "spectrum.csv").string());
    REQUIRE(t.header == std::vector<std::string>{"omega_rad_s", "lambda_nm",
                                                 "power_spectral_density_J_per_rad_s"});
    const auto omega = t.numeric_column("omega_rad_s");
    const auto psd = t.numeric_column("power_spectral_density_J_per_rad_s");
    double energy = 0.0;
    for (std::size_t k = 0; k + 1 < omega.size(); ++k)
        energy += 0.5 * (psd[k] + psd[k + 1]) * (omega[k + 1] - omega[k]);
    // 0.19 mW at 41 MHz
    CHECK(energy == approx(0.19e-3 / 41e6, 1e-9));
}

TEST_CASE("tar output is byte-identical across worker counts") {
    const fs::path d1 = scratch_dir("tar1");
    const fs::path d2 = scratch_dir("tar2");
    const std::string cfg =
        "fiber.gamma_per_w_km = 1.0\n"
        "calibration.s2_per_mw2 = 3.0\n"
        "tar.powers_mw = 0.1, 0.2\n"
        "tar.n_gates_per_point = 100000\n"
        "tar.detuning_a_nm = 4.4\n"
        "tar.detuning_b_nm = 5.6\n"
        "tar.s1_a_per_mw = 0.5\n"
        "tar.s1_b_per_mw = 1.5\n"
        "run.seed = 11\n";
    write_file(d1 / "run.cfg", cfg);
    REQUIRE(run_cli("--config " + (d1 / "run.cfg").string() + " --out " + d1.string() +
                    " --threads 1 tar") == 0);
    REQUIRE(run_cli("--config " + (d1 / "run.cfg").string() + " --out " + d2.string() +
                    " --threads 3 tar") == 0);
    const std::string a = slurp(d1 / "tar.csv");
    CHECK(a == slurp(d2 / "tar.csv"));
    CHECK_FALSE(a.empty());
    const CsvTable t = read_csv((d1 / "tar.csv").string());
    REQUIRE(t.rows.size() == 4);  // 2 powers x 2 detunings
}
