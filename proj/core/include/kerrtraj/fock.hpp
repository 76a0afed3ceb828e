#pragma once

#include <Eigen/Dense>

#include "kerrtraj/moments.hpp"
#include "kerrtraj/params.hpp"
#include "kerrtraj/rng.hpp"

namespace kerrtraj {

/// Pure state over a truncated number basis. `amps[k]` is the amplitude of
/// |k>. The amplitudes are kept normalized; `log_norm` accumulates the log of
/// the squared norm that has been divided out since the last jump (photon
/// counting) or since t=0 (diffusive), i.e. log <1>~ of the unnormalized state.
struct FockState {
    Eigen::VectorXcd amps;
    double log_norm = 0.0;

    static FockState vacuum(int n_levels);
    static FockState coherent(Complex alpha, int n_levels);
    static FockState fock(int k, int n_levels);

    int n_levels() const { return static_cast<int>(amps.size()); }
    double norm2() const { return amps.squaredNorm(); }
    /// Folds the current norm into log_norm and rescales to unit norm.
    void renormalize();
};

StateMoments fock_expectations(const FockState& state);

struct FockSolverOptions {
    /// Run aborts with TruncationError once the top level holds more
    /// relative population than this.
    double tail_threshold = 1e-8;
    /// Relative precision of the bisection that locates a jump time inside a
    /// deterministic step.
    double jump_time_rel_tol = 1e-6;
};

/// Exact single-trajectory stepper in truncated Fock space. Owns scratch
/// buffers, so one instance per trajectory (not shareable across threads).
class FockSolver {
public:
    FockSolver(const KerrParams& p, int n_levels, FockSolverOptions opt = {});

    struct PcStepResult {
        bool jumped = false;
        double t_advanced = 0.0;
    };

    /// Photon-counting deterministic segment. Advances by at most dt; when
    /// log <1>~ crosses log_threshold (= ln R) inside the step, the crossing
    /// is located by bisection, the jump a|psi>/||a|psi>|| applied, log_norm
    /// reset, and the partial step time returned. The caller draws the next R.
    PcStepResult pc_step(FockState& s, double dt, double log_threshold);

    /// One step of the diffusive (heterodyne / homodyne-X) stochastic
    /// Schroedinger equation. Strang split: RK4 half-step of the Stratonovich
    /// drift, exact noise flow exp(sqrt(gamma) dZ* a), RK4 half-step,
    /// renormalization. The exact noise map removes the dominant weak-order
    /// bias of an Euler noise term.
    void diffusive_step(FockState& s, double dt, const NoiseIncrement& noise);

    /// Drift of the diffusive SSE: pc_drift plus the measurement-backaction
    /// term gamma <a^dag> a psi (heterodyne) or gamma <a + a^dag> a psi
    /// (homodyne-X).
    void diffusive_drift(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const;

    /// a|psi>/||a|psi>||; resets log_norm. Throws if the click rate is zero.
    void apply_jump(FockState& s) const;

    /// d psi = (-iH - gamma/2 n) psi for the unnormalized PC evolution.
    void pc_drift(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const;

    const KerrParams& params() const { return params_; }
    int n_levels() const { return n_levels_; }

private:
    void rk4(const Eigen::VectorXcd& in, double dt, Eigen::VectorXcd& out);
    // diffusive_drift in Stratonovich form: homodyne-X picks up -gamma/2 a^2
    // from the real-noise quadratic variation; heterodyne has dZ^2 = 0.
    void strat_drift(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const;
    void strat_rk4(const Eigen::VectorXcd& in, double dt, Eigen::VectorXcd& out);
    // psi <- exp(w a) psi by Taylor series (a is nilpotent on the truncation)
    void apply_noise_flow(Eigen::VectorXcd& psi, Complex w);
    void check_tail(const Eigen::VectorXcd& psi, double norm2) const;

    KerrParams params_;
    int n_levels_;
    FockSolverOptions opt_;
    Eigen::VectorXcd diag_;    // -i(-delta k + u/2 k(k-1)) - gamma k / 2
    Eigen::VectorXd sqrt_k_;   // sqrt(k)
    Eigen::VectorXcd k1_, k2_, k3_, k4_, tmp_, save_;
};

} // namespace kerrtraj
