#include "kerrtraj/liouvillian.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>
#include <vector>

namespace kerrtraj {

namespace {

// Composite index of rho_{ij} in the column-stacked vector.
inline int idx(int i, int j, int n) { return i + n * j; }

} // namespace

Liouvillian::Liouvillian(const KerrParams& p, int n_levels) : n_levels_(n_levels) {
    p.validate();
    const int n = n_levels;
    const int dim = n * n;
    // H is tridiagonal: diagonal h_k = -delta k + u/2 k(k-1), off-diagonal
    // drive F sqrt(k). Assemble d rho_{ij}/dt entry by entry:
    //   -i (H rho)_{ij} + i (rho H)_{ij}
    //   + gamma (a rho a^dag)_{ij} - gamma/2 (n rho + rho n)_{ij}
    std::vector<double> h(n), sq(n + 1);
    for (int k = 0; k < n; ++k) h[k] = -p.delta * k + 0.5 * p.u * k * (k - 1.0);
    for (int k = 0; k <= n; ++k) sq[k] = std::sqrt(static_cast<double>(k));

    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<std::size_t>(dim) * 8);
    const Complex mi(0.0, -1.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int row = idx(i, j, n);
            // -i H rho: sum_k H_{ik} rho_{kj}
            trip.emplace_back(row, idx(i, j, n), mi * Complex(h[i]));
            if (i > 0) trip.emplace_back(row, idx(i - 1, j, n), mi * p.f * sq[i]);
            if (i + 1 < n) trip.emplace_back(row, idx(i + 1, j, n), mi * std::conj(p.f) * sq[i + 1]);
            // +i rho H: sum_k rho_{ik} H_{kj}
            trip.emplace_back(row, idx(i, j, n), -mi * Complex(h[j]));
            if (j > 0) trip.emplace_back(row, idx(i, j - 1, n), -mi * std::conj(p.f) * sq[j]);
            if (j + 1 < n) trip.emplace_back(row, idx(i, j + 1, n), -mi * p.f * sq[j + 1]);
            // gamma a rho a^dag: sqrt((i+1)(j+1)) rho_{i+1,j+1}
            if (i + 1 < n && j + 1 < n) {
                trip.emplace_back(row, idx(i + 1, j + 1, n), Complex(p.gamma * sq[i + 1] * sq[j + 1]));
            }
            // -gamma/2 (i + j) rho_{ij}
            trip.emplace_back(row, idx(i, j, n), Complex(-0.5 * p.gamma * (i + j)));
        }
    }
    mat_.resize(dim, dim);
    mat_.setFromTriplets(trip.begin(), trip.end());
    mat_.makeCompressed();
}

Eigen::MatrixXcd Liouvillian::steady_state(double tail_threshold) const {
    const int n = n_levels_;
    const int dim = n * n;
    // Trace preservation makes the rows linearly dependent; replace the
    // rho_00 row by the trace constraint and solve L x = e_00.
    Eigen::SparseMatrix<Complex> sys = mat_;
    for (int j = 0; j < dim; ++j) {
        sys.coeffRef(0, j) = Complex(0.0);
    }
    for (int k = 0; k < n; ++k) {
        sys.coeffRef(0, idx(k, k, n)) = Complex(1.0);
    }
    sys.makeCompressed();

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
    rhs[0] = 1.0;
    Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu(sys);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error("lindblad steady state: sparse LU factorization failed");
    }
    Eigen::VectorXcd x = lu.solve(rhs);

    double residual = (mat_ * x).norm();
    if (!(residual < 1e-8)) {
        std::ostringstream err;
        err << "lindblad steady state: null-space residual " << residual;
        throw std::runtime_error(err.str());
    }

    Eigen::MatrixXcd rho = Eigen::Map<Eigen::MatrixXcd>(x.data(), n, n);
    rho = 0.5 * (rho + rho.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        std::ostringstream err;
        err << "lindblad steady state: negative eigenvalue " << es.eigenvalues().minCoeff();
        throw std::runtime_error(err.str());
    }
    double tail = rho(n - 1, n - 1).real();
    if (tail > tail_threshold) {
        std::ostringstream err;
        err << "lindblad steady state: top-level occupation " << tail
            << " exceeds " << tail_threshold << "; increase n_levels";
        throw TruncationError(err.str());
    }
    return rho;
}

Eigen::MatrixXcd Liouvillian::evolve(const Eigen::MatrixXcd& rho0, double t, double dt) const {
    const int dim = n_levels_ * n_levels_;
    Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), dim);
    long steps = std::lround(t / dt);
    double h = t / steps;
    Eigen::VectorXcd k1(dim), k2(dim), k3(dim), k4(dim);
    for (long s = 0; s < steps; ++s) {
        k1 = mat_ * x;
        k2 = mat_ * (x + 0.5 * h * k1);
        k3 = mat_ * (x + 0.5 * h * k2);
        k4 = mat_ * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return Eigen::Map<Eigen::MatrixXcd>(x.data(), n_levels_, n_levels_);
}

StateMoments moments_from_rho(const Eigen::MatrixXcd& rho) {
    const int n = static_cast<int>(rho.rows());
    double mean_n = 0.0, a4 = 0.0;
    Complex mean_a = 0.0, mean_aa = 0.0;
    for (int k = 0; k < n; ++k) {
        double pk = rho(k, k).real();
        mean_n += k * pk;
        a4 += static_cast<double>(k) * (k - 1) * pk;
        // <a> = tr(a rho) = sum_k sqrt(k+1) rho_{k+1,k}
        if (k + 1 < n) mean_a += std::sqrt(k + 1.0) * rho(k + 1, k);
        if (k + 2 < n) mean_aa += std::sqrt((k + 1.0) * (k + 2.0)) * rho(k + 2, k);
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

StateMoments lindblad_steady_state(const KerrParams& p, int n_levels, double tail_threshold) {
    Liouvillian liou(p, n_levels);
    return moments_from_rho(liou.steady_state(tail_threshold));
}

} // namespace kerrtraj
