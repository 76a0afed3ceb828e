#pragma once

#include <complex>

#include "kerrtraj/errors.hpp"

namespace kerrtraj {

using Complex = std::complex<double>;

/// Measurement protocol assumed for the environment. Photon counting yields
/// piecewise-deterministic jump trajectories, the other two diffusive ones.
enum class Unraveling { PhotonCounting, Heterodyne, HomodyneX };

const char* to_string(Unraveling u);

/// Physical parameters of the driven-dissipative Kerr cavity,
///   H = -delta a^dag a + (u/2) a^dag a^dag a a + f a^dag + f^* a,
/// with photon loss at rate gamma. All rates are expressed in units of
/// gamma = 1; gamma_x + gamma_p = gamma splits the loss over the monitored
/// quadratures (gamma_x = gamma_p for heterodyne, gamma_p = 0 for homodyne-X).
struct KerrParams {
    double delta = 0.0;
    double u = 0.0;
    Complex f{0.0, 0.0};
    double gamma = 1.0;
    double gamma_x = 0.5;
    double gamma_p = 0.5;

    static KerrParams heterodyne(double delta, double u, Complex f, double gamma = 1.0) {
        return KerrParams{delta, u, f, gamma, gamma / 2, gamma / 2};
    }
    static KerrParams homodyne_x(double delta, double u, Complex f, double gamma = 1.0) {
        return KerrParams{delta, u, f, gamma, gamma, 0.0};
    }

    bool is_heterodyne() const { return gamma_x == gamma_p; }
    bool is_homodyne_x() const { return gamma_p == 0.0; }

    /// Throws ConfigError if rates are inconsistent.
    void validate() const;
};

/// One Ito noise increment dZ over a step of width dt.
struct NoiseIncrement {
    Complex dz{0.0, 0.0};
};

} // namespace kerrtraj
