#pragma once

#include "kerrtraj/moments.hpp"
#include "kerrtraj/params.hpp"

namespace kerrtraj {

/// Variational state Gaussian in density and phase: means and (co)variances
/// of the conjugate pair (n, theta), [n, theta] = i. theta is stored
/// unwrapped on the real line; observables use it only through exp(ik theta)
/// factors. Valid at sufficiently high density.
struct NThetaState {
    double n = 0.0;
    double var_n = 0.0;
    double theta = 0.0;
    double var_theta = 0.0;
    double cov = 0.0; // <dn dtheta>_sym
    double log_norm = 0.0;

    /// Coherent |alpha>: n = |alpha|^2, Poissonian var_n, minimum-uncertainty
    /// phase spread.
    static NThetaState coherent(Complex alpha);

    /// var_n var_theta - cov^2 - 1/4; zero on the pure manifold.
    double heisenberg_residual() const { return var_n * var_theta - cov * cov - 0.25; }
};

/// The density-phase correlators <f(n) g(dtheta) exp(-i theta)> expanded to
/// second order in the density fluctuations with phase moments resummed.
struct CorrelatorSet {
    Complex c1, c2, c3, c4, c5, c6, c7;
    Complex d1, d2, d3;
};

CorrelatorSet correlators(const NThetaState& s);

struct NThetaDerivative {
    double dn = 0.0, dvar_n = 0.0, dtheta = 0.0, dvar_theta = 0.0, dcov = 0.0;
    double dlog_norm = 0.0;
};

/// Deterministic photon-counting evolution of all five moments plus
/// d log<1>/dt = -gamma n.
NThetaDerivative ntheta_pc_drift(const NThetaState& s, const KerrParams& p);

/// Jump update when <1>~ reaches R. var_theta uses the expanded inverse
/// moment <1/n> ~ 1/n + var_n/n^3 unless recompute_var_theta_from_purity.
NThetaState ntheta_pc_jump(const NThetaState& s, bool var_theta_from_purity_closure = false);

/// Closed-form free (F=0) photon-counting evolution over time t, including
/// log<1>(t) = -gamma n(0) t + (gamma^2/2) var_n t^2.
NThetaState ntheta_free_evolution_exact(const NThetaState& s0, double t, const KerrParams& p);

/// Time until log<1> first reaches ln r under the F=0 closed form. Returns
/// +inf when the discriminant is negative (the norm never reaches r before
/// the deterministic branch leaves the validity regime).
double next_jump_time(const NThetaState& s, double r, double gamma = 1.0);

/// var_theta from the pure-state bound (1/4 + cov^2)/var_n.
double var_theta_from_purity(double var_n, double cov);

StateMoments ntheta_quadratures(const NThetaState& s);

struct NThetaSolverOptions {
    /// Validity floor on the density; crossing it aborts the trajectory.
    double n_min = 1.0;
    /// Tolerated violation of the Heisenberg bound before aborting, relative
    /// to max(1, var_n var_theta). Under heterodyne noise the truncated
    /// equations let the residual diffuse at O(n^{-1/2}) per unit sqrt(time),
    /// so this is a blowup guard, not an accuracy target.
    double heisenberg_tol = 0.1;
    /// Evolve four moments and recompute var_theta from the pure-state bound
    /// after every jump and heterodyne step (the reduced-variable variant).
    bool var_theta_purity_closure = false;
    double jump_time_rel_tol = 1e-6;
};

class NThetaSolver {
public:
    NThetaSolver(const KerrParams& p, NThetaSolverOptions opt = {}) : params_(p), opt_(opt) {}

    struct PcStepResult {
        bool jumped = false;
        double t_advanced = 0.0;
    };

    /// RK4 deterministic segment with bisected jump location. For F = 0 the
    /// step is short-circuited through the closed-form solution and jump-time
    /// formula.
    PcStepResult pc_step(NThetaState& s, double dt, double log_threshold) const;

    /// Ito heterodyne step: RK4 on the drift (including the Ito correction
    /// terms) plus noise increments evaluated at the step-start state.
    void heterodyne_step(NThetaState& s, double dt, const NoiseIncrement& noise) const;

    const KerrParams& params() const { return params_; }
    const NThetaSolverOptions& options() const { return opt_; }

private:
    void check_validity(const NThetaState& s) const;
    NThetaState rk4(const NThetaState& s, double dt) const;

    KerrParams params_;
    NThetaSolverOptions opt_;
};

} // namespace kerrtraj
