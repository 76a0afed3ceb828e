#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kerrtraj/fock.hpp"
#include "kerrtraj/gaussian_ntheta.hpp"
#include "kerrtraj/gaussian_xp.hpp"
#include "kerrtraj/moments.hpp"
#include "kerrtraj/params.hpp"
#include "kerrtraj/twa.hpp"

namespace kerrtraj {

enum class Method { Exact, Xp, NTheta, Twa };

const char* to_string(Method m);

/// Sample instants at which trajectory observables are recorded.
struct TimeGrid {
    double t0 = 0.0;
    double t1 = 0.0;
    std::vector<double> sample_times;

    static TimeGrid uniform(double t0, double t1, int n_samples);
    void validate() const; // strictly ascending, within [t0, t1]
};

/// Per-trajectory observable track. Intra-trajectory variances are present
/// for trajectory methods and absent for TWA (a point sample has none).
struct TrajectoryRecord {
    Method method = Method::Exact;
    Unraveling scheme = Unraveling::PhotonCounting;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string failure_reason;
    bool has_intra_variance = true;
    std::vector<StateMoments> moments; // one row per sample time
    std::vector<double> jump_times;    // photon counting only
};

struct RunSpec {
    Method method = Method::Exact;
    Unraveling scheme = Unraveling::PhotonCounting;
    KerrParams params;
    Complex alpha0{0.0, 0.0}; // coherent initial state; 0 = vacuum
    TimeGrid grid;
    int n_traj = 1;
    std::uint64_t master_seed = 0;
    double dt_pc = 1e-3;
    double dt_diffusive = 1e-4;
    double dt_twa = 1e-3;
    int n_levels = 0; // exact method only; 0 = 4 <n>_max + 40 heuristic
    /// Fraction of validity-aborted trajectories tolerated before the whole
    /// ensemble is failed.
    double failure_budget = 0.01;
    int workers = 1; // 0 = hardware concurrency
    /// Pump switch-off: f is set to zero for t >= f_off_time (if >= 0).
    double f_off_time = -1.0;
    FockSolverOptions fock_options;
    XpSolverOptions xp_options;
    NThetaSolverOptions ntheta_options;

    void validate() const;
    int effective_n_levels() const;
};

/// Runs n_traj trajectories, trajectory k seeded with
/// derive_trajectory_seed(master_seed, k). Results are identical whether run
/// serially or in parallel. Failed trajectories are marked, never dropped.
std::vector<TrajectoryRecord> run_ensemble(const RunSpec& spec);

enum class Observable { N, X, P };

/// Per-time-point ensemble statistics of one observable, population-(1/N)
/// normalized: var_total = var_intra + var_inter exactly.
struct ObservableStats {
    std::vector<double> mean, var_total, var_intra, var_inter, std_error;
};

struct EnsembleStats {
    int n_used = 0;
    int n_failed = 0;
    ObservableStats n, x, p;
    std::vector<Complex> mean_a;
    std::vector<double> g2; // ensemble-level <adag adag a a> / <n>^2; NaN if undefined
};

/// Requires >= 2 successful trajectories on a common grid.
EnsembleStats variance_decomposition(const std::vector<TrajectoryRecord>& records);

const ObservableStats& stats_for(const EnsembleStats& stats, Observable obs);

/// N_TWA / N_traj = 1 + var_intra / var_inter needed for equal precision.
/// infinite is set when var_inter vanishes (deterministic ensemble point).
struct SampleRatio {
    double value = 1.0;
    bool infinite = false;
};

SampleRatio sample_ratio_criterion(const EnsembleStats& stats, Observable obs,
                                   std::size_t time_index);

} // namespace kerrtraj
