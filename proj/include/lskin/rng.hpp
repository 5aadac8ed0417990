// rng.hpp — deterministic seeding and portable draw helpers.
//
// Every stochastic ingredient of an experiment (disorder, inputs, initial
// state, shot noise) draws from its own stream derived from one master seed,
// so any single realization can be replayed in isolation. Uniform and
// Gaussian draws are generated from raw engine words rather than
// std:: distributions, which keeps output independent of the standard
// library implementation.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lskin {

// Finalizer of splitmix64; good 64-bit mixing for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Named sub-streams of a (master seed, realization) pair.
enum class Stream : std::uint64_t {
    Disorder = 1,
    Inputs = 2,
    InitialState = 3,
    ShotNoise = 4,
    Generic = 5,
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t realization, Stream stream) {
    std::uint64_t z = mix64(master);
    z = mix64(z ^ realization);
    z = mix64(z ^ static_cast<std::uint64_t>(stream));
    return z;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with full 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Fair coin from the top engine bit.
    int coin() { return static_cast<int>(engine_() >> 63); }

    // Standard normal via Box-Muller, caching the spare deviate.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.28318530717958647692;
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_{0.0};
    bool have_spare_{false};
};

}  // namespace lskin
