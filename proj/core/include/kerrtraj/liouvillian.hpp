#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kerrtraj/moments.hpp"
#include "kerrtraj/params.hpp"

namespace kerrtraj {

/// Sparse Liouvillian of the Kerr-cavity Lindblad equation over a truncated
/// number basis, acting on column-stacked density matrices. One construction
/// serves both the steady-state solve and direct time integration.
class Liouvillian {
public:
    Liouvillian(const KerrParams& p, int n_levels);

    int n_levels() const { return n_levels_; }
    const Eigen::SparseMatrix<Complex>& matrix() const { return mat_; }

    /// Unique steady state: solves L rho = 0 with tr(rho) = 1 via sparse LU.
    /// Throws if the residual does not vanish, if rho has an eigenvalue below
    /// -1e-10, or if the top-level occupation exceeds tail_threshold.
    Eigen::MatrixXcd steady_state(double tail_threshold = 1e-8) const;

    /// RK4 time integration of d rho/dt = L rho.
    Eigen::MatrixXcd evolve(const Eigen::MatrixXcd& rho0, double t, double dt) const;

private:
    int n_levels_;
    Eigen::SparseMatrix<Complex> mat_;
};

StateMoments moments_from_rho(const Eigen::MatrixXcd& rho);

/// Steady-state oracle: moments of the Lindblad null space. Ground truth for
/// every stationary comparison in the test suites.
StateMoments lindblad_steady_state(const KerrParams& p, int n_levels,
                                   double tail_threshold = 1e-8);

} // namespace kerrtraj
