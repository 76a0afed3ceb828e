#include "kerrtraj/fock.hpp"

#include <cmath>
#include <sstream>

namespace kerrtraj {

FockState FockState::vacuum(int n_levels) {
    FockState s;
    s.amps = Eigen::VectorXcd::Zero(n_levels);
    s.amps[0] = 1.0;
    return s;
}

FockState FockState::fock(int k, int n_levels) {
    FockState s;
    s.amps = Eigen::VectorXcd::Zero(n_levels);
    s.amps[k] = 1.0;
    return s;
}

FockState FockState::coherent(Complex alpha, int n_levels) {
    FockState s;
    s.amps.resize(n_levels);
    // c_k = alpha^k / sqrt(k!) e^{-|alpha|^2/2}, built by recurrence.
    Complex c = std::exp(-0.5 * std::norm(alpha));
    for (int k = 0; k < n_levels; ++k) {
        s.amps[k] = c;
        c *= alpha / std::sqrt(static_cast<double>(k + 1));
    }
    s.renormalize();
    s.log_norm = 0.0;
    return s;
}

void FockState::renormalize() {
    double nn = amps.squaredNorm();
    log_norm += std::log(nn);
    amps /= std::sqrt(nn);
}

StateMoments fock_expectations(const FockState& state) {
    const auto& c = state.amps;
    const int n_levels = state.n_levels();
    double mean_n = 0.0, mean_n2 = 0.0, a4 = 0.0;
    Complex mean_a = 0.0, mean_aa = 0.0;
    for (int k = 0; k < n_levels; ++k) {
        double pk = std::norm(c[k]);
        mean_n += k * pk;
        mean_n2 += static_cast<double>(k) * k * pk;
        a4 += static_cast<double>(k) * (k - 1) * pk;
        if (k + 1 < n_levels) {
            mean_a += std::conj(c[k]) * std::sqrt(k + 1.0) * c[k + 1];
        }
        if (k + 2 < n_levels) {
            mean_aa += std::conj(c[k]) * std::sqrt((k + 1.0) * (k + 2.0)) * c[k + 2];
        }
    }
    StateMoments m;
    set_g2(m, mean_n, a4);
    m.mean_a = mean_a;
    double ex = mean_a.real(), ep = mean_a.imag();
    m.var_x = (2.0 * mean_aa.real() + 2.0 * mean_n + 1.0) / 4.0 - ex * ex;
    m.var_p = (-2.0 * mean_aa.real() + 2.0 * mean_n + 1.0) / 4.0 - ep * ep;
    m.cov_xp = mean_aa.imag() / 2.0 - ex * ep;
    return m;
}

FockSolver::FockSolver(const KerrParams& p, int n_levels, FockSolverOptions opt)
    : params_(p), n_levels_(n_levels), opt_(opt) {
    p.validate();
    diag_.resize(n_levels);
    sqrt_k_.resize(n_levels);
    for (int k = 0; k < n_levels; ++k) {
        double hk = -p.delta * k + 0.5 * p.u * k * (k - 1.0);
        diag_[k] = Complex(0.0, -hk) - Complex(0.5 * p.gamma * k, 0.0);
        sqrt_k_[k] = std::sqrt(static_cast<double>(k));
    }
    k1_.resize(n_levels);
    k2_.resize(n_levels);
    k3_.resize(n_levels);
    k4_.resize(n_levels);
    tmp_.resize(n_levels);
    save_.resize(n_levels);
}

void FockSolver::pc_drift(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
    const int n = n_levels_;
    const Complex mif = Complex(0.0, -1.0) * params_.f;        // -iF for the a^dag term
    const Complex mifc = Complex(0.0, -1.0) * std::conj(params_.f);
    for (int k = 0; k < n; ++k) {
        Complex v = diag_[k] * psi[k];
        if (k > 0) v += mif * sqrt_k_[k] * psi[k - 1];
        if (k + 1 < n) v += mifc * sqrt_k_[k + 1] * psi[k + 1];
        out[k] = v;
    }
}

void FockSolver::rk4(const Eigen::VectorXcd& in, double dt, Eigen::VectorXcd& out) {
    pc_drift(in, k1_);
    tmp_ = in + (0.5 * dt) * k1_;
    pc_drift(tmp_, k2_);
    tmp_ = in + (0.5 * dt) * k2_;
    pc_drift(tmp_, k3_);
    tmp_ = in + dt * k3_;
    pc_drift(tmp_, k4_);
    out = in + (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
}

void FockSolver::check_tail(const Eigen::VectorXcd& psi, double norm2) const {
    double tail = std::norm(psi[n_levels_ - 1]) / norm2;
    if (tail > opt_.tail_threshold) {
        std::ostringstream err;
        err << "Fock truncation violated: top-level population " << tail << " exceeds "
            << opt_.tail_threshold << " (n_levels=" << n_levels_ << ")";
        throw TruncationError(err.str());
    }
}

void FockSolver::apply_jump(FockState& s) const {
    // (a psi)_k = sqrt(k+1) psi_{k+1}
    const int n = n_levels_;
    for (int k = 0; k + 1 < n; ++k) {
        s.amps[k] = sqrt_k_[k + 1] * s.amps[k + 1];
    }
    s.amps[n - 1] = 0.0;
    double nn = s.amps.squaredNorm();
    if (nn <= 0.0) {
        throw ValidityError("photon-counting jump with zero click rate");
    }
    s.amps /= std::sqrt(nn);
    s.log_norm = 0.0;
}

FockSolver::PcStepResult FockSolver::pc_step(FockState& s, double dt, double log_threshold) {
    save_ = s.amps;
    rk4(save_, dt, s.amps);
    double nn = s.amps.squaredNorm();
    if (nn > 1.0 + 1e-9) {
        throw TruncationError("squared norm increased during a deterministic segment; "
                              "decrease dt (integrator instability)");
    }
    check_tail(s.amps, nn);
    double log_end = s.log_norm + std::log(nn);
    if (log_end > log_threshold) {
        s.log_norm = log_end;
        s.amps /= std::sqrt(nn);
        return {false, dt};
    }

    // Locate the crossing of log<1> = log_threshold inside (0, dt].
    double lo = 0.0, hi = dt;
    while ((hi - lo) > opt_.jump_time_rel_tol * hi) {
        double mid = 0.5 * (lo + hi);
        rk4(save_, mid, s.amps);
        double lg = s.log_norm + std::log(s.amps.squaredNorm());
        (lg > log_threshold ? lo : hi) = mid;
    }
    rk4(save_, hi, s.amps);
    double nj = s.amps.squaredNorm();
    check_tail(s.amps, nj);
    s.amps /= std::sqrt(nj);
    s.log_norm = 0.0;
    apply_jump(s);
    return {true, hi};
}

void FockSolver::diffusive_drift(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
    const int n = n_levels_;
    // <a^dag> of psi, normalized in place so intra-step norm drift is harmless.
    Complex mean_a = 0.0;
    double nn = 0.0;
    for (int k = 0; k < n; ++k) {
        nn += std::norm(psi[k]);
        if (k + 1 < n) mean_a += std::conj(psi[k]) * sqrt_k_[k + 1] * psi[k + 1];
    }
    // physical-measure mean of the signal: <a^dag> for heterodyne,
    // <a + a^dag> for homodyne-X
    const Complex gad = params_.is_homodyne_x()
                            ? params_.gamma * (mean_a + std::conj(mean_a)) / nn
                            : params_.gamma * std::conj(mean_a) / nn;
    pc_drift(psi, out); // (-iH - gamma/2 n) psi
    for (int k = 0; k < n; ++k) {
        if (k + 1 < n) out[k] += gad * sqrt_k_[k + 1] * psi[k + 1];
    }
}

void FockSolver::strat_drift(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
    diffusive_drift(psi, out);
    if (params_.is_homodyne_x()) {
        const int n = n_levels_;
        // real-noise Ito -> Stratonovich correction: -gamma/2 a^2 psi
        for (int k = 0; k + 2 < n; ++k) {
            out[k] -= 0.5 * params_.gamma * sqrt_k_[k + 1] * sqrt_k_[k + 2] * psi[k + 2];
        }
    }
}

void FockSolver::strat_rk4(const Eigen::VectorXcd& in, double dt, Eigen::VectorXcd& out) {
    strat_drift(in, k1_);
    tmp_ = in + (0.5 * dt) * k1_;
    strat_drift(tmp_, k2_);
    tmp_ = in + (0.5 * dt) * k2_;
    strat_drift(tmp_, k3_);
    tmp_ = in + dt * k3_;
    strat_drift(tmp_, k4_);
    out = in + (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
}

void FockSolver::apply_noise_flow(Eigen::VectorXcd& psi, Complex w) {
    const int n = n_levels_;
    save_ = psi;
    for (int j = 1; j < n; ++j) {
        const Complex c = w / static_cast<double>(j);
        for (int k = 0; k + 1 < n; ++k) {
            save_[k] = c * sqrt_k_[k + 1] * save_[k + 1];
        }
        save_[n - 1] = 0.0;
        psi += save_;
        if (save_.squaredNorm() < 1e-32 * psi.squaredNorm()) break;
    }
}

void FockSolver::diffusive_step(FockState& s, double dt, const NoiseIncrement& noise) {
    // Strang split: half-step drift, exact noise flow, half-step drift.
    const Complex w = std::sqrt(params_.gamma) * std::conj(noise.dz);
    strat_rk4(s.amps, 0.5 * dt, tmp_);
    s.amps = tmp_;
    apply_noise_flow(s.amps, w);
    strat_rk4(s.amps, 0.5 * dt, tmp_);
    s.amps = tmp_;
    double nn = s.amps.squaredNorm();
    check_tail(s.amps, nn);
    s.renormalize();
}

} // namespace kerrtraj
