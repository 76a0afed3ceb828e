#include "kerrtraj/gaussian_xp.hpp"

#include <cmath>

namespace kerrtraj {

double XpGaussianState::purity() const {
    return 1.0 / std::sqrt(1.0 + 4.0 * purity_residual());
}

XpDerivative xp_pc_drift(const XpGaussianState& s, const KerrParams& p) {
    const Complex alpha = s.alpha, dd = s.dd;
    const double nd = s.nd;
    const double a2 = std::norm(alpha);
    const Complex i(0.0, 1.0);

    XpDerivative d;
    d.dalpha = (-0.5 * p.gamma + i * p.delta) * alpha -
               i * p.u * (a2 * alpha + 2.0 * alpha * nd + std::conj(alpha) * dd) -
               i * p.f - p.gamma * (alpha * nd + std::conj(alpha) * dd);
    d.ddd = (2.0 * i * p.delta - p.gamma) * dd -
            i * p.u * (alpha * alpha * (1.0 + 2.0 * nd) + dd * (1.0 + 4.0 * a2 + 6.0 * nd)) -
            2.0 * p.gamma * nd * dd;
    d.dnd = 2.0 * p.u * std::imag(alpha * alpha * std::conj(dd)) -
            p.gamma * (nd + nd * nd + std::norm(dd));
    d.dlog_norm = -p.gamma * (a2 + nd);
    return d;
}

XpGaussianState xp_pc_jump(const XpGaussianState& s) {
    const Complex alpha = s.alpha, dd = s.dd;
    const double nd = s.nd;
    const double a2 = std::norm(alpha);
    const double rate = a2 + nd;
    if (!(rate > 0.0)) {
        throw ValidityError("xp_pc_jump: zero click rate");
    }
    const double rate2 = rate * rate; // |alpha|^4 + 2|alpha|^2 nd + nd^2
    XpGaussianState out;
    out.alpha = (a2 * alpha + 2.0 * alpha * nd + std::conj(alpha) * dd) / rate;
    out.dd = (a2 * a2 * dd + 2.0 * a2 * nd * dd - alpha * alpha * nd * nd +
              3.0 * nd * nd * dd - std::conj(alpha) * std::conj(alpha) * dd * dd) /
             rate2;
    out.nd = (a2 * a2 * nd - 2.0 * std::real(alpha * alpha * std::conj(dd) * nd) +
              nd * std::norm(dd) + 2.0 * a2 * nd * nd + 2.0 * nd * nd * nd) /
             rate2;
    out.log_norm = 0.0;
    return out;
}

double nd_from_purity(Complex dd) {
    return 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * std::norm(dd)));
}

StateMoments xp_observables(const XpGaussianState& s) {
    const double a2 = std::norm(s.alpha);
    const double nd = s.nd;
    const double mean_n = a2 + nd;
    // Wick fourth moment of a displaced Gaussian state.
    const double a4 = a2 * a2 + 4.0 * a2 * nd +
                      2.0 * std::real(std::conj(s.alpha) * std::conj(s.alpha) * s.dd) +
                      2.0 * nd * nd + std::norm(s.dd);
    StateMoments m;
    set_g2(m, mean_n, a4);
    m.mean_a = s.alpha;
    m.var_x = (1.0 + 2.0 * nd + 2.0 * s.dd.real()) / 4.0;
    m.var_p = (1.0 + 2.0 * nd - 2.0 * s.dd.real()) / 4.0;
    m.cov_xp = s.dd.imag() / 2.0;
    return m;
}

namespace {

XpGaussianState axpy(const XpGaussianState& s, double h, const XpDerivative& d,
                     SecondMomentClosure closure) {
    XpGaussianState out;
    out.alpha = s.alpha + h * d.dalpha;
    out.dd = s.dd + h * d.ddd;
    out.nd = (closure == SecondMomentClosure::Purity) ? nd_from_purity(out.dd)
                                                      : s.nd + h * d.dnd;
    out.log_norm = s.log_norm + h * d.dlog_norm;
    return out;
}

} // namespace

namespace {

// Heterodyne drift: the photon-counting equations without the
// -gamma(alpha nd + alpha* dd) mean-field term (it is replaced by noise);
// the second-moment equations are identical.
XpDerivative xp_het_drift(const XpGaussianState& s, const KerrParams& p) {
    XpDerivative d = xp_pc_drift(s, p);
    d.dalpha += p.gamma * (s.alpha * s.nd + std::conj(s.alpha) * s.dd);
    d.dlog_norm = 0.0;
    return d;
}

} // namespace

XpGaussianState XpSolver::rk4(const XpGaussianState& s, double dt, bool heterodyne) const {
    const auto c = opt_.closure;
    auto drift = heterodyne ? xp_het_drift : xp_pc_drift;
    XpDerivative k1 = drift(s, params_);
    XpDerivative k2 = drift(axpy(s, 0.5 * dt, k1, c), params_);
    XpDerivative k3 = drift(axpy(s, 0.5 * dt, k2, c), params_);
    XpDerivative k4 = drift(axpy(s, dt, k3, c), params_);
    XpDerivative sum;
    sum.dalpha = (k1.dalpha + 2.0 * k2.dalpha + 2.0 * k3.dalpha + k4.dalpha) / 6.0;
    sum.ddd = (k1.ddd + 2.0 * k2.ddd + 2.0 * k3.ddd + k4.ddd) / 6.0;
    sum.dnd = (k1.dnd + 2.0 * k2.dnd + 2.0 * k3.dnd + k4.dnd) / 6.0;
    sum.dlog_norm = (k1.dlog_norm + 2.0 * k2.dlog_norm + 2.0 * k3.dlog_norm + k4.dlog_norm) / 6.0;
    return axpy(s, dt, sum, c);
}

XpSolver::PcStepResult XpSolver::pc_step(XpGaussianState& s, double dt,
                                         double log_threshold) const {
    XpGaussianState end = rk4(s, dt, false);
    if (end.log_norm > log_threshold) {
        s = end;
        return {false, dt};
    }
    double lo = 0.0, hi = dt;
    while ((hi - lo) > opt_.jump_time_rel_tol * hi) {
        double mid = 0.5 * (lo + hi);
        (rk4(s, mid, false).log_norm > log_threshold ? lo : hi) = mid;
    }
    XpGaussianState at_jump = rk4(s, hi, false);
    s = xp_pc_jump(at_jump);
    if (opt_.closure == SecondMomentClosure::Purity) {
        s.nd = nd_from_purity(s.dd);
    }
    return {true, hi};
}

void XpSolver::heterodyne_step(XpGaussianState& s, double dt,
                               const NoiseIncrement& noise) const {
    // Noise coefficients at the step start (Ito convention); the second
    // moments carry no noise, so only alpha gets a stochastic increment.
    const Complex stoch = std::sqrt(params_.gamma) *
                          (s.nd * noise.dz + s.dd * std::conj(noise.dz));
    s = rk4(s, dt, /*heterodyne=*/true);
    s.alpha += stoch;
}

} // namespace kerrtraj
