#pragma once

// Shared test fixtures: Gaussian states embedded in the truncated Fock basis
// (the independent oracle for the variational solvers) and finite-difference
// time derivatives of exact expectation values.

#include <cmath>
#include <complex>

#include "kerrtraj/fock.hpp"
#include "kerrtraj/gaussian_xp.hpp"

namespace support {

using kerrtraj::Complex;
using kerrtraj::FockState;
using kerrtraj::KerrParams;

struct RawMoments {
    Complex a{0.0, 0.0};
    Complex aa{0.0, 0.0};
    double n = 0.0;
    double n2 = 0.0;
};

inline RawMoments raw_moments(const FockState& s) {
    RawMoments m;
    const auto& c = s.amps;
    const int n = s.n_levels();
    for (int k = 0; k < n; ++k) {
        double pk = std::norm(c[k]);
        m.n += k * pk;
        m.n2 += static_cast<double>(k) * k * pk;
        if (k + 1 < n) m.a += std::conj(c[k]) * std::sqrt(k + 1.0) * c[k + 1];
        if (k + 2 < n) m.aa += std::conj(c[k]) * std::sqrt((k + 1.0) * (k + 2.0)) * c[k + 2];
    }
    return m;
}

inline FockState squeezed_vacuum(double r, double phi, int n_levels) {
    FockState s;
    s.amps = Eigen::VectorXcd::Zero(n_levels);
    const Complex w = -std::exp(Complex(0.0, phi)) * std::tanh(r);
    Complex c = 1.0 / std::sqrt(std::cosh(r));
    for (int m = 0; 2 * m < n_levels; ++m) {
        s.amps[2 * m] = c;
        double k = 2.0 * (m + 1);
        c *= w * std::sqrt(k * (k - 1.0)) / k;
    }
    s.renormalize();
    s.log_norm = 0.0;
    return s;
}

/// exp(alpha a^dag - alpha^* a)|s> by RK4 integration in the flow parameter.
inline FockState displace(FockState s, Complex alpha, int n_steps = 1000) {
    const int n = s.n_levels();
    auto gen = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        for (int k = 0; k < n; ++k) {
            Complex v = 0.0;
            if (k > 0) v += alpha * std::sqrt(static_cast<double>(k)) * in[k - 1];
            if (k + 1 < n) v -= std::conj(alpha) * std::sqrt(k + 1.0) * in[k + 1];
            out[k] = v;
        }
    };
    const double h = 1.0 / n_steps;
    Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (int step = 0; step < n_steps; ++step) {
        gen(s.amps, k1);
        tmp = s.amps + (0.5 * h) * k1;
        gen(tmp, k2);
        tmp = s.amps + (0.5 * h) * k2;
        gen(tmp, k3);
        tmp = s.amps + h * k3;
        gen(tmp, k4);
        s.amps += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    s.renormalize();
    s.log_norm = 0.0;
    return s;
}

/// Pure Gaussian state (alpha, dd, nd on the purity manifold) as a displaced
/// squeezed vacuum: nd = sinh^2 r, dd = -e^{i phi} sinh r cosh r.
inline FockState embed_xp(const kerrtraj::XpGaussianState& g, int n_levels) {
    double r = std::asinh(std::sqrt(g.nd));
    double phi = (std::abs(g.dd) > 0.0) ? std::arg(-g.dd) : 0.0;
    return displace(squeezed_vacuum(r, phi, n_levels), g.alpha);
}

/// Central-difference d/dt of the normalized expectation values under the
/// deterministic photon-counting evolution.
inline RawMoments pc_derivative(const FockState& s, const KerrParams& p, double dt = 1e-5) {
    kerrtraj::FockSolver solver(p, s.n_levels());
    const int n = s.n_levels();
    Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto rk4 = [&](const Eigen::VectorXcd& in, double h) {
        Eigen::VectorXcd out(n);
        solver.pc_drift(in, k1);
        tmp = in + (0.5 * h) * k1;
        solver.pc_drift(tmp, k2);
        tmp = in + (0.5 * h) * k2;
        solver.pc_drift(tmp, k3);
        tmp = in + h * k3;
        solver.pc_drift(tmp, k4);
        out = in + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        return out;
    };
    FockState plus = s, minus = s;
    plus.amps = rk4(s.amps, dt);
    minus.amps = rk4(s.amps, -dt);
    plus.renormalize();
    minus.renormalize();
    RawMoments mp = raw_moments(plus), mm = raw_moments(minus);
    RawMoments d;
    d.a = (mp.a - mm.a) / (2.0 * dt);
    d.aa = (mp.aa - mm.aa) / (2.0 * dt);
    d.n = (mp.n - mm.n) / (2.0 * dt);
    d.n2 = (mp.n2 - mm.n2) / (2.0 * dt);
    return d;
}

} // namespace support
