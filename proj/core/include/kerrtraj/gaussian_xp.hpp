#pragma once

#include "kerrtraj/moments.hpp"
#include "kerrtraj/params.hpp"

namespace kerrtraj {

/// Variational state Gaussian in the ladder operators: mean field
/// alpha = <a>, connected anomalous moment dd = <delta delta> and connected
/// density nd = <delta^dag delta>, plus the accumulated log <1>~ used for
/// photon-counting jump timing.
struct XpGaussianState {
    Complex alpha{0.0, 0.0};
    Complex dd{0.0, 0.0};
    double nd = 0.0;
    double log_norm = 0.0;

    static XpGaussianState coherent(Complex alpha) { return {alpha, {0, 0}, 0.0, 0.0}; }

    double mean_n() const { return std::norm(alpha) + nd; }
    /// nd + nd^2 - |dd|^2; zero on the pure manifold.
    double purity_residual() const { return nd + nd * nd - std::norm(dd); }
    double purity() const;
};

struct XpDerivative {
    Complex dalpha{0.0, 0.0};
    Complex ddd{0.0, 0.0};
    double dnd = 0.0;
    double dlog_norm = 0.0;
};

/// Wick-closed deterministic evolution between photon-counting jumps,
/// including d log<1>/dt = -gamma (|alpha|^2 + nd).
XpDerivative xp_pc_drift(const XpGaussianState& s, const KerrParams& p);

/// Photon-counting jump update. Requires a nonzero click rate |alpha|^2 + nd.
XpGaussianState xp_pc_jump(const XpGaussianState& s);

/// Nonnegative root of nd + nd^2 = |dd|^2 (pure-state closure).
double nd_from_purity(Complex dd);

StateMoments xp_observables(const XpGaussianState& s);

enum class SecondMomentClosure {
    Purity,   // nd recomputed from dd each step (default; cheaper and stable)
    Explicit, // nd evolved by its own equation; required near zero density
};

struct XpSolverOptions {
    SecondMomentClosure closure = SecondMomentClosure::Purity;
    double jump_time_rel_tol = 1e-6;
};

/// Trajectory stepper mirroring the Fock solver's jump machinery so that
/// seed-matched photon-counting comparisons consume identical R sequences.
class XpSolver {
public:
    XpSolver(const KerrParams& p, XpSolverOptions opt = {}) : params_(p), opt_(opt) {}

    struct PcStepResult {
        bool jumped = false;
        double t_advanced = 0.0;
    };

    /// RK4 deterministic segment with bisected jump location, as in FockSolver.
    PcStepResult pc_step(XpGaussianState& s, double dt, double log_threshold) const;

    /// Heterodyne step: RK4 on the deterministic part (the second moments are
    /// noise-free) plus the Ito noise increment on alpha evaluated at the
    /// step-start state.
    void heterodyne_step(XpGaussianState& s, double dt, const NoiseIncrement& noise) const;

    const KerrParams& params() const { return params_; }

private:
    XpGaussianState rk4(const XpGaussianState& s, double dt, bool heterodyne) const;

    KerrParams params_;
    XpSolverOptions opt_;
};

} // namespace kerrtraj
