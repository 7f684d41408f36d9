#pragma once

#include <cmath>
#include <cstdint>

namespace dsfpair {

// splitmix64 (Steele, Lea, Vigna); used for seeding and for deriving
// per-block substreams from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman, Vigna). Hand-rolled so that streams are
// bit-identical across platforms and standard libraries.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

// Substream seed for a gate block: master seed mixed with the block index.
inline std::uint64_t derive_block_seed(std::uint64_t master_seed, std::uint64_t block_index) {
    std::uint64_t s = master_seed ^ (0x9e3779b97f4a7c15ULL * (block_index + 1));
    return splitmix64(s);
}

// Bose-Einstein (single-mode thermal) photon number, P(n) = mu^n/(1+mu)^(n+1).
// Inverse-CDF draw: geometric with success probability 1/(1+mu).
struct BoseEinsteinSampler {
    double p0 = 1.0;          // P(n = 0)
    double inv_log_r = 0.0;   // 1 / log(mu/(1+mu))

    explicit BoseEinsteinSampler(double mu) {
        if (mu > 0.0) {
            p0 = 1.0 / (1.0 + mu);
            inv_log_r = 1.0 / (std::log(mu) - std::log1p(mu));
        }
    }

    std::uint32_t draw(Xoshiro256pp& rng) const {
        const double u = rng.uniform();
        if (u < p0) return 0;  // fast path, also covers mu = 0
        return static_cast<std::uint32_t>(std::log1p(-u) * inv_log_r);
    }
};

// Poisson photon number by CDF inversion; means here are small (<~ 10).
struct PoissonSampler {
    double mu = 0.0;
    double p0 = 1.0;  // exp(-mu)

    explicit PoissonSampler(double mean) : mu(mean), p0(std::exp(-mean)) {}

    std::uint32_t draw(Xoshiro256pp& rng) const {
        const double u = rng.uniform();
        if (u < p0) return 0;
        double cum = p0;
        double pk = p0;
        std::uint32_t k = 0;
        while (cum < u && k < 4096) {
            ++k;
            pk *= mu / static_cast<double>(k);
            cum += pk;
        }
        return k;
    }
};

// Number of detected photons out of n, each seen with probability eta.
inline std::uint32_t thin_binomial(std::uint32_t n, double eta, Xoshiro256pp& rng) {
    std::uint32_t hits = 0;
    for (std::uint32_t k = 0; k < n; ++k)
        if (rng.uniform() < eta) ++hits;
    return hits;
}

}  // namespace dsfpair
