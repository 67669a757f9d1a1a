#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

// Seeded random source with explicit substream derivation.  Every stochastic
// routine in the library takes an Rng (or a seed) so that runs replay exactly.

namespace mimovq {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Folds up to three stream tags into a master seed.  Used to give chunks of
// Monte Carlo trials, training phases, etc. their own independent streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(seed ^ 0x5851f42d4c957f2dull);
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ b);
    s = splitmix64(s ^ c);
    return s;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).  Modulo bias is below 1e-15 for any n that
    // appears here (constellation orders, channel-set sizes).
    std::uint64_t uniform_int(std::uint64_t n) { return engine_() % n; }

    // Standard normal pair via Box-Muller.
    void gaussian_pair(double& z0, double& z1) {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        z0 = r * std::cos(t);
        z1 = r * std::sin(t);
    }

    double gaussian() {
        double a, b;
        gaussian_pair(a, b);
        return a;
    }

    void fill_gaussian(std::span<double> out) {
        std::size_t i = 0;
        for (; i + 1 < out.size(); i += 2) gaussian_pair(out[i], out[i + 1]);
        if (i < out.size()) out[i] = gaussian();
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace mimovq
