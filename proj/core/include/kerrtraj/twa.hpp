#pragma once

#include <span>
#include <vector>

#include "kerrtraj/moments.hpp"
#include "kerrtraj/params.hpp"
#include "kerrtraj/rng.hpp"

namespace kerrtraj {

/// One truncated-Wigner phase-space point. Not a physical state; only
/// ensemble averages of symmetric-ordered functions are meaningful.
struct TwaSample {
    Complex alpha{0.0, 0.0};
};

/// Draws from the Wigner function of the coherent state |alpha0>:
/// alpha0 + (eta1 + i eta2)/2 with independent standard normals.
TwaSample twa_initial_sample(Complex alpha0, RngStream& rng);

/// Stochastic Heun step of
///   d alpha = [-iF + (i delta - gamma/2) alpha - i u (|alpha|^2 - 1) alpha] dt
///             + sqrt(gamma/2) dxi,   E|dxi|^2 = dt, E dxi^2 = 0.
/// The -1 symmetric-ordering shift and the sqrt(gamma/2) diffusion come from
/// the second-order truncation of the Wigner Fokker-Planck equation; they are
/// certified by the linear-model (u = 0) exactness test rather than assumed.
TwaSample twa_step(const TwaSample& s, const KerrParams& p, double dt, RngStream& rng);

/// Symmetric-to-normal order conversion over a sample cloud:
/// mean_n = <|a|^2>_W - 1/2, <adag adag a a> = <|a|^4>_W - 2<|a|^2>_W + 1/2.
StateMoments twa_observables(std::span<const TwaSample> samples);

} // namespace kerrtraj
