#pragma once

#include <vector>

#include "kerrtraj/fock.hpp"
#include "kerrtraj/gaussian_ntheta.hpp"
#include "kerrtraj/gaussian_xp.hpp"

namespace kerrtraj {

/// Rectangular phase-space grid in (x, p); values are stored row-major with x
/// varying fastest. Cell centers at x0 + (i + 1/2) dx.
struct WignerGrid {
    int nx = 128;
    int np = 128;
    double x0 = -3.0, x1 = 3.0;
    double p0 = -3.0, p1 = 3.0;

    double dx() const { return (x1 - x0) / nx; }
    double dp() const { return (p1 - p0) / np; }
    double x_at(int i) const { return x0 + (i + 0.5) * dx(); }
    double p_at(int j) const { return p0 + (j + 0.5) * dp(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * np; }
};

double grid_integral(const WignerGrid& grid, const std::vector<double>& values);

/// Exact Wigner function via the Laguerre representation of the displaced
/// parity kernel; X = (a + a^dag)/2 convention, vacuum peak 2/pi.
std::vector<double> wigner_from_fock(const FockState& state, const WignerGrid& grid);

/// Bivariate normal with mean (Re alpha, Im alpha) and the quadrature
/// covariance of the state. Throws on singular covariance.
std::vector<double> wigner_from_xp(const XpGaussianState& s, const WignerGrid& grid);

/// Approximate visual surrogate: the (n, theta) normal pushed through the
/// polar map x = sqrt(n) cos theta, p = sqrt(n) sin theta. Not an exact
/// Wigner function.
std::vector<double> wigner_from_ntheta(const NThetaState& s, const WignerGrid& grid);

} // namespace kerrtraj
