#include "kerrtraj/twa.hpp"

#include <cmath>

namespace kerrtraj {

TwaSample twa_initial_sample(Complex alpha0, RngStream& rng) {
    double e1 = rng.normal();
    double e2 = rng.normal();
    return {alpha0 + 0.5 * Complex(e1, e2)};
}

namespace {

Complex twa_drift(Complex alpha, const KerrParams& p) {
    const Complex i(0.0, 1.0);
    return -i * p.f + (i * p.delta - 0.5 * p.gamma) * alpha -
           i * p.u * (std::norm(alpha) - 1.0) * alpha;
}

} // namespace

TwaSample twa_step(const TwaSample& s, const KerrParams& p, double dt, RngStream& rng) {
    // Stochastic Heun: the noise is additive, so the predictor-corrector pair
    // removes the first-order drift bias at no interpretation cost.
    const double sd = std::sqrt(0.25 * p.gamma * dt); // per-component of dxi
    const Complex dxi(sd * rng.normal(), sd * rng.normal());
    const Complex k1 = twa_drift(s.alpha, p);
    const Complex pred = s.alpha + k1 * dt + dxi;
    const Complex k2 = twa_drift(pred, p);
    return {s.alpha + 0.5 * (k1 + k2) * dt + dxi};
}

StateMoments twa_observables(std::span<const TwaSample> samples) {
    double w2 = 0.0, w4 = 0.0;
    Complex a = 0.0, aa = 0.0;
    double x2 = 0.0, p2 = 0.0, xp = 0.0;
    for (const TwaSample& s : samples) {
        double m = std::norm(s.alpha);
        w2 += m;
        w4 += m * m;
        a += s.alpha;
        aa += s.alpha * s.alpha;
        x2 += s.alpha.real() * s.alpha.real();
        p2 += s.alpha.imag() * s.alpha.imag();
        xp += s.alpha.real() * s.alpha.imag();
    }
    const double inv = 1.0 / static_cast<double>(samples.size());
    w2 *= inv; w4 *= inv; a *= inv; aa *= inv; x2 *= inv; p2 *= inv; xp *= inv;

    StateMoments m;
    const double mean_n = w2 - 0.5;
    const double a4 = w4 - 2.0 * w2 + 0.5; // <adag adag a a>
    set_g2(m, mean_n, a4);
    m.mean_a = a;
    // Wigner samples estimate symmetric-ordered moments directly; the Wigner
    // variance of X already equals Var(X) in the (a + adag)/2 convention.
    m.var_x = x2 - a.real() * a.real();
    m.var_p = p2 - a.imag() * a.imag();
    m.cov_xp = xp - a.real() * a.imag();
    return m;
}

} // namespace kerrtraj
