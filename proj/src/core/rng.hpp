#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cranhet {

// Mixes a tuple of integers into a single 64-bit seed (splitmix64 finalizer).
// Used to derive independent, replayable streams from (base, indices...).
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c = 0) {
    std::uint64_t s = mix_seed(base);
    s = mix_seed(s ^ mix_seed(a + 1));
    s = mix_seed(s ^ mix_seed(b + 2));
    s = mix_seed(s ^ mix_seed(c + 3));
    return s;
}

// Seedable, portable generator. mt19937_64 has a standard-pinned sequence and
// all variate transforms below are written out explicitly, so identical seeds
// give bit-identical draws on every platform. Distribution adapters from
// <random> are deliberately avoided (their output is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal pair via Box-Muller; no state is cached across calls.
    void normal_pair(double& z0, double& z1) {
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        z0 = r * std::cos(t);
        z1 = r * std::sin(t);
    }

    double normal() {
        double z0, z1;
        normal_pair(z0, z1);
        return z0;
    }

    // Circularly-symmetric complex Gaussian with E[|h|^2] = mean_power.
    std::complex<double> complex_gaussian(double mean_power) {
        double z0, z1;
        normal_pair(z0, z1);
        const double s = std::sqrt(mean_power / 2.0);
        return {s * z0, s * z1};
    }

    // Uniform point in the axis-aligned square [0, side] x [0, side].
    void point_in_square(double side, double& x, double& y) {
        x = side * uniform01();
        y = side * uniform01();
    }

    // Uniform point in the disc of given radius around (cx, cy).
    void point_in_disc(double cx, double cy, double radius, double& x, double& y) {
        const double r = radius * std::sqrt(uniform01());
        const double t = 2.0 * M_PI * uniform01();
        x = cx + r * std::cos(t);
        y = cy + r * std::sin(t);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace cranhet
