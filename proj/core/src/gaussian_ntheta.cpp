#include "kerrtraj/gaussian_ntheta.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace kerrtraj {

namespace {
const Complex I(0.0, 1.0);
} // namespace

NThetaState NThetaState::coherent(Complex alpha) {
    double n = std::norm(alpha);
    if (!(n > 0.0)) {
        throw ValidityError("NThetaState::coherent: zero density is outside the validity regime");
    }
    NThetaState s;
    s.n = n;
    s.var_n = n;
    s.theta = std::arg(alpha);
    s.var_theta = 1.0 / (4.0 * n);
    s.cov = 0.0;
    return s;
}

CorrelatorSet correlators(const NThetaState& s) {
    if (!(s.n > 0.0)) {
        throw ValidityError("correlators: density must be positive");
    }
    const double n = s.n, vn = s.var_n, vt = s.var_theta, cov = s.cov;
    const double sqn = std::sqrt(n);
    const Complex E = std::exp(Complex(-0.5 * vt, -s.theta)); // e^{-i<theta> - vt/2}
    const Complex q = cov + 0.5 * I;
    const double in1 = 1.0 / (2.0 * n);   // 1/(2n)
    const double in2 = 1.0 / (8.0 * n * n); // 1/(8n^2)

    CorrelatorSet c;
    c.c1 = sqn * E * (1.0 + in1 * (0.5 - I * cov) - vn * in2);
    c.c2 = sqn * E *
           ((0.5 - I * cov) + in1 * (vn + 0.25 - 0.5 * I * cov - cov * cov) +
            3.0 * in2 * (-0.5 * vn + I * cov * vn));
    c.c3 = E / sqn * (1.0 + in1 * (-0.5 + I * cov) + 3.0 * vn * in2);
    c.c4 = E / sqn *
           (-I * vt - in1 * q * (1.0 - vt) - 3.0 * I * in2 * (2.0 * q * q + vn * vt));
    c.c5 = E / (sqn * n) * (1.0 + in1 * (-1.5 + 3.0 * I * cov) + 15.0 * vn * in2);
    c.c6 = sqn * E *
           (-I * vt + in1 * q * (1.0 - vt) + I * in2 * (2.0 * q * q + vn * vt));
    c.c7 = sqn * E * (in1 * (1.0 - 2.0 * I * cov) - vn / (2.0 * n * n));
    c.d1 = sqn * E *
           ((1.0 - vt) * vt - I * in1 * (3.0 * vt - vt * vt) * q -
            in2 * (vn * vt + 2.0 * q * q));
    c.d2 = sqn * E *
           (q * (1.0 - vt) - I * in1 * (vn * vt + q * q * (2.0 - vt)) -
            3.0 * in2 * vn * q);
    c.d3 = sqn * E *
           (vn - q * q - I * in1 * (3.0 * vn * q - 6.0 * q * q * q) - 3.0 * vn * in2);
    return c;
}

NThetaDerivative ntheta_pc_drift(const NThetaState& s, const KerrParams& p) {
    NThetaDerivative d;
    d.dn = -p.gamma * s.var_n;
    d.dtheta = (p.delta + 0.5 * p.u) - p.u * s.n - p.gamma * s.cov;
    d.dvar_theta = -2.0 * p.u * s.cov;
    d.dcov = -p.u * s.var_n;
    d.dlog_norm = -p.gamma * s.n;
    if (p.f != Complex(0.0, 0.0)) {
        CorrelatorSet c = correlators(s);
        d.dn += 2.0 * std::imag(p.f * c.c1);
        d.dvar_n += 4.0 * std::imag(p.f * c.c2) - 2.0 * std::imag(p.f * c.c1);
        d.dtheta -= std::real(p.f * c.c3);
        d.dvar_theta += -2.0 * std::real(p.f * c.c4) + 0.5 * std::imag(p.f * c.c5);
        d.dcov += 2.0 * std::imag(p.f * c.c6) - std::real(p.f * c.c7);
    }
    return d;
}

NThetaState ntheta_pc_jump(const NThetaState& s, bool var_theta_from_purity_closure) {
    const double n = s.n, vn = s.var_n, vt = s.var_theta, cov = s.cov;
    NThetaState out = s;
    out.n = n - 1.0 + vn / n;
    out.var_n = vn * (1.0 - vn / (n * n));
    out.theta = s.theta + cov / n;
    out.cov = cov * (1.0 - vn / (n * n));
    if (var_theta_from_purity_closure) {
        out.var_theta = var_theta_from_purity(out.var_n, out.cov);
    } else {
        // expanded <1/n> ~ 1/n + var_n/n^3
        out.var_theta = vt + (0.25 - cov * cov) / (n * n) + vn / (4.0 * n * n * n * n);
    }
    out.log_norm = 0.0;
    if (!(out.n > 0.0)) {
        std::ostringstream err;
        err << "ntheta_pc_jump: post-jump density " << out.n << " is not positive";
        throw ValidityError(err.str());
    }
    return out;
}

NThetaState ntheta_free_evolution_exact(const NThetaState& s0, double t, const KerrParams& p) {
    const double g = p.gamma, u = p.u;
    NThetaState s;
    s.n = s0.n - g * s0.var_n * t;
    s.var_n = s0.var_n;
    s.theta = s0.theta + (p.delta + u * (0.5 - s0.n) - g * s0.cov) * t + u * g * s0.var_n * t * t;
    s.var_theta = s0.var_theta - 2.0 * u * s0.cov * t + u * u * s0.var_n * t * t;
    s.cov = s0.cov - u * s0.var_n * t;
    s.log_norm = s0.log_norm - g * s0.n * t + 0.5 * g * g * s0.var_n * t * t;
    return s;
}

double next_jump_time(const NThetaState& s, double r, double gamma) {
    if (!(r > 0.0 && r < 1.0)) {
        throw ConfigError("next_jump_time: r must lie in (0, 1)");
    }
    const double n = s.n, vn = s.var_n;
    const double lnr = std::log(r);
    if (vn / (n * n) < 1e-8) {
        // series limit, avoids catastrophic cancellation in 1 - sqrt(1 - eps)
        return -lnr / (gamma * n);
    }
    const double disc = 1.0 + 2.0 * vn * lnr / (n * n);
    if (disc < 0.0) {
        // the log-norm parabola never reaches ln r
        return std::numeric_limits<double>::infinity();
    }
    return (n / (gamma * vn)) * (1.0 - std::sqrt(disc));
}

double var_theta_from_purity(double var_n, double cov) {
    if (!(var_n > 0.0)) {
        throw ValidityError("var_theta_from_purity: var_n must be positive");
    }
    return (0.25 + cov * cov) / var_n;
}

StateMoments ntheta_quadratures(const NThetaState& s) {
    if (!(s.n > 0.0)) {
        throw ValidityError("ntheta_quadratures: density must be positive");
    }
    const double n = s.n, vn = s.var_n, vt = s.var_theta, cov = s.cov;
    CorrelatorSet c = correlators(s);
    StateMoments m;
    set_g2(m, n, n * n + vn - n); // <n(n-1)>
    m.mean_a = std::conj(c.c1);
    // <a^2> = <sqrt(n(n-1)) e^{-2i theta}>^* expanded with the same technique
    // as the C-correlators: phase moments resummed, sqrt(n(n-1)) ~
    // n - 1/2 - 1/(8n) expanded to second order in density fluctuations.
    const Complex a2 = std::exp(Complex(-2.0 * vt, 2.0 * s.theta)) *
                       Complex(n + 0.5 - 1.0 / (8.0 * n) - vn / (8.0 * n * n * n),
                               2.0 * cov);
    const double ex = m.mean_a.real(), ep = m.mean_a.imag();
    m.var_x = (2.0 * a2.real() + 2.0 * n + 1.0) / 4.0 - ex * ex;
    m.var_p = (-2.0 * a2.real() + 2.0 * n + 1.0) / 4.0 - ep * ep;
    m.cov_xp = a2.imag() / 2.0 - ex * ep;
    return m;
}

namespace {

NThetaDerivative ntheta_het_drift(const NThetaState& s, const KerrParams& p,
                                  const CorrelatorSet& c) {
    const double g = p.gamma;
    NThetaDerivative d;
    d.dn = -g * s.n;
    d.dvar_n = -2.0 * g * s.var_n + g * s.n - 2.0 * g * std::norm(c.c2 - c.c1);
    d.dtheta = (p.delta + 0.5 * p.u) - p.u * s.n;
    const double inv_n = 1.0 / s.n + s.var_n / (s.n * s.n * s.n); // <1/n> expansion
    d.dvar_theta = -2.0 * p.u * s.cov + 0.25 * g * inv_n - 2.0 * g * std::norm(c.c6);
    d.dcov = -p.u * s.var_n - g * s.cov - 2.0 * g * std::real((c.c2 - c.c1) * std::conj(c.c6));
    if (p.f != Complex(0.0, 0.0)) {
        d.dn += 2.0 * std::imag(p.f * c.c1);
        d.dvar_n += 4.0 * std::imag(p.f * c.c2) - 2.0 * std::imag(p.f * c.c1);
        d.dtheta -= std::real(p.f * c.c3);
        d.dvar_theta += -2.0 * std::real(p.f * c.c4) + 0.5 * std::imag(p.f * c.c5);
        d.dcov += 2.0 * std::imag(p.f * c.c6) - std::real(p.f * c.c7);
    }
    return d;
}

NThetaState axpy(const NThetaState& s, double h, const NThetaDerivative& d) {
    NThetaState out = s;
    out.n += h * d.dn;
    out.var_n += h * d.dvar_n;
    out.theta += h * d.dtheta;
    out.var_theta += h * d.dvar_theta;
    out.cov += h * d.dcov;
    out.log_norm += h * d.dlog_norm;
    return out;
}

NThetaDerivative rk4_combine(const NThetaDerivative& k1, const NThetaDerivative& k2,
                             const NThetaDerivative& k3, const NThetaDerivative& k4) {
    NThetaDerivative d;
    d.dn = (k1.dn + 2.0 * k2.dn + 2.0 * k3.dn + k4.dn) / 6.0;
    d.dvar_n = (k1.dvar_n + 2.0 * k2.dvar_n + 2.0 * k3.dvar_n + k4.dvar_n) / 6.0;
    d.dtheta = (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta) / 6.0;
    d.dvar_theta =
        (k1.dvar_theta + 2.0 * k2.dvar_theta + 2.0 * k3.dvar_theta + k4.dvar_theta) / 6.0;
    d.dcov = (k1.dcov + 2.0 * k2.dcov + 2.0 * k3.dcov + k4.dcov) / 6.0;
    d.dlog_norm =
        (k1.dlog_norm + 2.0 * k2.dlog_norm + 2.0 * k3.dlog_norm + k4.dlog_norm) / 6.0;
    return d;
}

} // namespace

void NThetaSolver::check_validity(const NThetaState& s) const {
    if (!(s.n >= opt_.n_min)) {
        std::ostringstream err;
        err << "ntheta: density " << s.n << " fell below the validity floor " << opt_.n_min;
        throw ValidityError(err.str());
    }
    if (s.var_n < 0.0 || s.var_theta < 0.0) {
        throw ValidityError("ntheta: negative variance");
    }
    // relative to the uncertainty product: a sheared state can legitimately
    // carry a large absolute residual while staying near the pure manifold
    const double scale = std::max(1.0, s.var_n * s.var_theta);
    if (s.heisenberg_residual() < -opt_.heisenberg_tol * scale) {
        std::ostringstream err;
        err << "ntheta: Heisenberg bound violated, residual " << s.heisenberg_residual();
        throw ValidityError(err.str());
    }
}

NThetaState NThetaSolver::rk4(const NThetaState& s, double dt) const {
    NThetaDerivative k1 = ntheta_pc_drift(s, params_);
    NThetaDerivative k2 = ntheta_pc_drift(axpy(s, 0.5 * dt, k1), params_);
    NThetaDerivative k3 = ntheta_pc_drift(axpy(s, 0.5 * dt, k2), params_);
    NThetaDerivative k4 = ntheta_pc_drift(axpy(s, dt, k3), params_);
    return axpy(s, dt, rk4_combine(k1, k2, k3, k4));
}

NThetaSolver::PcStepResult NThetaSolver::pc_step(NThetaState& s, double dt,
                                                 double log_threshold) const {
    if (params_.f == Complex(0.0, 0.0)) {
        // closed-form free evolution with the analytic jump-time formula
        double r = std::exp(log_threshold - s.log_norm);
        double tj;
        if (r >= 1.0) {
            tj = 0.0; // already at/below threshold
        } else if (r > 0.0) {
            tj = next_jump_time(s, r, params_.gamma);
        } else {
            tj = std::numeric_limits<double>::infinity(); // threshold underflows
        }
        if (tj <= dt) {
            NThetaState at_jump = ntheta_free_evolution_exact(s, tj, params_);
            s = ntheta_pc_jump(at_jump, opt_.var_theta_purity_closure);
            check_validity(s);
            return {true, tj};
        }
        s = ntheta_free_evolution_exact(s, dt, params_);
        check_validity(s);
        return {false, dt};
    }

    NThetaState end = rk4(s, dt);
    if (end.log_norm > log_threshold) {
        s = end;
        check_validity(s);
        return {false, dt};
    }
    double lo = 0.0, hi = dt;
    while ((hi - lo) > opt_.jump_time_rel_tol * hi) {
        double mid = 0.5 * (lo + hi);
        (rk4(s, mid).log_norm > log_threshold ? lo : hi) = mid;
    }
    NThetaState at_jump = rk4(s, hi);
    s = ntheta_pc_jump(at_jump, opt_.var_theta_purity_closure);
    check_validity(s);
    return {true, hi};
}

void NThetaSolver::heterodyne_step(NThetaState& s, double dt,
                                   const NoiseIncrement& noise) const {
    const double sg = std::sqrt(params_.gamma);
    CorrelatorSet c = correlators(s);
    // stochastic increments at the step-start state (Ito convention)
    const Complex dz = noise.dz;
    const double sn = 2.0 * sg * std::real((c.c2 - c.c1) * dz);
    const double svn =
        2.0 * sg * std::real((c.d3 - 2.0 * c.c2 + c.c1 * (1.0 - s.var_n)) * dz);
    const double sth = 2.0 * sg * std::real(c.c6 * dz);
    const double svt = 2.0 * sg * std::real((c.d1 - s.var_theta * c.c1) * dz);
    const double scov = 2.0 * sg *
                        std::real((-c.c6 - (s.cov + 0.5 * I) * c.c1 + c.d2) * dz);

    // RK4 on the drift (deterministic terms plus Ito corrections)
    auto drift = [this](const NThetaState& x) {
        return ntheta_het_drift(x, params_, correlators(x));
    };
    NThetaDerivative k1 = drift(s);
    NThetaDerivative k2 = drift(axpy(s, 0.5 * dt, k1));
    NThetaDerivative k3 = drift(axpy(s, 0.5 * dt, k2));
    NThetaDerivative k4 = drift(axpy(s, dt, k3));
    s = axpy(s, dt, rk4_combine(k1, k2, k3, k4));

    s.n += sn;
    s.var_n += svn;
    s.theta += sth;
    s.var_theta += svt;
    s.cov += scov;
    if (opt_.var_theta_purity_closure) {
        s.var_theta = var_theta_from_purity(s.var_n, s.cov);
    }
    check_validity(s);
}

} // namespace kerrtraj
