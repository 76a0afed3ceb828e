#pragma once

#include <cstdint>
#include <random>

#include "kerrtraj/params.hpp"

namespace kerrtraj {

/// Deterministic per-trajectory random stream. Built on std::mt19937_64 (the
/// engine's output sequence is fixed by the standard) with hand-rolled
/// uniform and Box-Muller transforms, so the draw sequence is identical on
/// every platform. Not shareable across threads; each trajectory owns one.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in (0, 1] (never 0, so ln(u) is finite).
    double uniform();

    /// Standard normal via Box-Muller on the portable uniforms.
    double normal();

    Complex complex_normal_pair() {
        double a = normal();
        double b = normal();
        return {a, b};
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Seed for trajectory `index` of a run with `master_seed`. Injective in
/// `index` for a fixed master seed (odd-multiplier counter fed through the
/// splitmix64 bijection).
std::uint64_t derive_trajectory_seed(std::uint64_t master_seed, std::uint64_t trajectory_index);

/// Wiener increment over dt for a diffusive scheme:
///   heterodyne  dz = sqrt(1/2) (dW_X + i dW_P),  E|dz|^2 = dt, E dz^2 = 0
///   homodyne-X  dz = dW_X (real),                E dz^2 = dt
/// Photon counting consumes uniform jump thresholds, not Wiener noise.
NoiseIncrement sample_noise(RngStream& rng, double dt, Unraveling scheme);

} // namespace kerrtraj
