#include "dsfpair/counting.hpp"

#include <atomic>
#include <thread>

#include "dsfpair/leakage.hpp"
#include "dsfpair/propagation.hpp"
#include "dsfpair/units.hpp"

namespace dsfpair {

namespace {

constexpr std::uint64_t kBlockGates = 1u << 16;

struct BlockResult {
    std::vector<std::uint32_t> s_hits;  // tentative clicks, pre dead time
    std::vector<std::uint32_t> i_hits;
};

// Detected >= 1 of n photons, each seen with probability eta. Early exit
// keeps the stream deterministic (draws depend only on prior outcomes).
inline bool detects(std::uint32_t n, double eta, Xoshiro256pp& rng) {
    for (std::uint32_t k = 0; k < n; ++k)
        if (rng.uniform() < eta) return true;
    return false;
}

void simulate_block(const PhotonDrawKit& kit, const DetectorSpec& det_s, const DetectorSpec& det_i,
                    std::uint64_t g0, std::uint64_t g1, std::uint64_t seed, std::uint64_t block,
                    BlockResult& out) {
    Xoshiro256pp rng(derive_block_seed(seed, block));
    // Per gate: photon draws, signal thinning, idler thinning, signal dark,
    // idler dark. This order is part of the reproducibility contract.
    for (std::uint64_t g = g0; g < g1; ++g) {
        const auto [ns, ni] = kit.draw(rng);
        bool click_s = detects(ns, det_s.efficiency, rng);
        bool click_i = detects(ni, det_i.efficiency, rng);
        if (rng.uniform() < det_s.dark_prob) click_s = true;
        if (rng.uniform() < det_i.dark_prob) click_i = true;
        if (click_s) out.s_hits.push_back(static_cast<std::uint32_t>(g));
        if (click_i) out.i_hits.push_back(static_cast<std::uint32_t>(g));
    }
}

// Sequential dead-time suppression over block-ordered tentative clicks.
std::vector<std::uint32_t> apply_dead_time(const std::vector<BlockResult>& blocks,
                                           bool signal, std::uint64_t dead) {
    std::vector<std::uint32_t> accepted;
    bool armed = true;
    std::uint64_t next_live = 0;  // first gate index that can register a click
    for (const auto& b : blocks) {
        const auto& hits = signal ? b.s_hits : b.i_hits;
        for (std::uint32_t g : hits) {
            if (!armed && g < next_live) continue;
            accepted.push_back(g);
            armed = false;
            next_live = static_cast<std::uint64_t>(g) + dead + 1;
        }
    }
    return accepted;
}

}  // namespace

GateLedger simulate_gates(const RateBreakdown& rates, const DetectorSpec& det_s,
                          const DetectorSpec& det_i, std::uint64_t n_gates,
                          std::uint64_t seed, unsigned n_threads) {
    rates.validate();
    det_s.validate();
    det_i.validate();
    if (n_gates < 1) throw DomainError("simulate_gates: n_gates must be >= 1");
    if (n_gates > 0xFFFFFFFFull) throw ConfigError("simulate_gates: n_gates must fit in 32 bits");

    const PhotonDrawKit kit(rates);
    const std::uint64_t n_blocks = (n_gates + kBlockGates - 1) / kBlockGates;
    std::vector<BlockResult> blocks(n_blocks);

    auto run_block = [&](std::uint64_t b) {
        const std::uint64_t g0 = b * kBlockGates;
        const std::uint64_t g1 = std::min(n_gates, g0 + kBlockGates);
        simulate_block(kit, det_s, det_i, g0, g1, seed, b, blocks[b]);
    };

    if (n_threads <= 1 || n_blocks == 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        const unsigned workers = std::min<std::uint64_t>(n_threads, n_blocks);
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (std::uint64_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
                    run_block(b);
            });
        for (auto& th : pool) th.join();
    }

    GateLedger ledger;
    ledger.n_gates = n_gates;
    ledger.rng_seed = seed;
    ledger.signal_hits = apply_dead_time(blocks, true, det_s.dead_gates());
    ledger.idler_hits = apply_dead_time(blocks, false, det_i.dead_gates());
    return ledger;
}

CoincidenceStats coincidences(const GateLedger& ledger) {
    if (ledger.n_gates < 2) throw DomainError("coincidences: need at least 2 gates");
    CoincidenceStats st;
    st.n_gates = ledger.n_gates;
    st.singles_s = ledger.signal_hits.size();
    st.singles_i = ledger.idler_hits.size();

    const auto& s = ledger.signal_hits;
    const auto& i = ledger.idler_hits;
    std::size_t a = 0, b = 0;
    while (a < s.size() && b < i.size()) {
        if (s[a] == i[b]) { ++st.c_c; ++a; ++b; }
        else if (s[a] < i[b]) ++a;
        else ++b;
    }
    // accidentals: signal at g together with idler at g + 1
    a = 0; b = 0;
    while (a < s.size() && b < i.size()) {
        const std::uint64_t target = static_cast<std::uint64_t>(s[a]) + 1;
        if (target == i[b]) { ++st.c_a; ++a; ++b; }
        else if (target < i[b]) ++a;
        else ++b;
    }
    if (st.c_a > 0)
        st.tar = (static_cast<double>(st.c_c) - static_cast<double>(st.c_a)) / static_cast<double>(st.c_a);
    return st;
}

RateBreakdown rates_from_physics(const PumpPulse& pulse, const FiberSpec& fiber,
                                 const PulseTrain& train, double detuning,
                                 double filter_sigma, double peak_transmission,
                                 const PropagationConfig& cfg, const Calibration& calib,
                                 bool use_split_step) {
    train.validate();
    if (calib.s1 < 0.0 || calib.s2 < 0.0)
        throw DomainError("rates_from_physics: calibration coefficients must be >= 0");
    const double p_ave = train.average_power;

    RateBreakdown r;
    r.mu_raman_s = r.mu_raman_i = calib.s1 * p_ave;
    r.mu_pair = calib.s2 * p_ave * p_ave;

    PumpPulse pumped = pulse;
    pumped.peak_power = peak_power_from_average(train, pulse.t0);
    if (pumped.peak_power > 0.0) {
        const SpectralField field = use_split_step ? split_step_propagate(pumped, fiber, cfg)
                                                   : spm_spectrum(pumped, fiber, cfg);
        BandFilter f;
        f.sigma = filter_sigma;
        f.peak_transmission = peak_transmission;
        f.center_wavelength = pulse.center_wavelength - detuning;  // signal: short-wavelength side
        r.mu_spm_s = spm_band_photons(field, f);
        f.center_wavelength = pulse.center_wavelength + detuning;  // idler: long-wavelength side
        r.mu_spm_i = spm_band_photons(field, f);
    }
    return r;
}

}  // namespace dsfpair
