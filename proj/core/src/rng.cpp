#include "kerrtraj/rng.hpp"

#include <cmath>
#include <numbers>

namespace kerrtraj {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

double RngStream::uniform() {
    // 53-bit mantissa in (0, 1]: never returns 0.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
}

std::uint64_t derive_trajectory_seed(std::uint64_t master_seed, std::uint64_t trajectory_index) {
    // splitmix64 is a bijection and the odd-multiplier counter is injective in
    // the index, so distinct indices of one master seed never collide.
    return splitmix64(splitmix64(master_seed) ^ (0x9e3779b97f4a7c15ULL * (trajectory_index + 1)));
}

NoiseIncrement sample_noise(RngStream& rng, double dt, Unraveling scheme) {
    if (dt <= 0.0) {
        throw ConfigError("sample_noise: dt must be positive");
    }
    double sqrt_dt = std::sqrt(dt);
    switch (scheme) {
        case Unraveling::Heterodyne: {
            double wx = rng.normal() * sqrt_dt;
            double wp = rng.normal() * sqrt_dt;
            return {Complex{wx, wp} * std::numbers::sqrt2 / 2.0};
        }
        case Unraveling::HomodyneX:
            return {Complex{rng.normal() * sqrt_dt, 0.0}};
        case Unraveling::PhotonCounting:
            break;
    }
    throw ConfigError("sample_noise: photon counting consumes jump thresholds, not Wiener noise");
}

} // namespace kerrtraj
