#include "kerrtraj/wigner.hpp"

#include <cmath>
#include <numbers>

namespace kerrtraj {

double grid_integral(const WignerGrid& grid, const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * grid.dx() * grid.dp();
}

std::vector<double> wigner_from_fock(const FockState& state, const WignerGrid& grid) {
    const auto& c = state.amps;
    const int n = state.n_levels();
    std::vector<double> out(grid.size());
    const double two_over_pi = 2.0 / std::numbers::pi;

    for (int j = 0; j < grid.np; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Complex beta(grid.x_at(i), grid.p_at(j));
            const double z = 4.0 * std::norm(beta);
            // The e^{-2|beta|^2} prefactor is split as e^{-z/4} into both the
            // Laguerre recurrence seed and the (2 beta*)^k/sqrt(k!) factor so
            // intermediates stay inside double range at large |beta|.
            const double seed = std::exp(-0.25 * z);
            double total = 0.0;
            Complex qk(seed, 0.0); // (2 conj(beta))^k / sqrt(k!) * e^{-z/4}
            const Complex step = 2.0 * std::conj(beta);
            for (int k = 0; k < n; ++k) {
                if (k > 0) qk *= step / std::sqrt(static_cast<double>(k));
                // scaled associated Laguerre: L_m^k(z) e^{-z/4}
                double lm1 = seed;
                double lm2 = 0.0;
                double rho = 1.0; // sqrt(m! k! / (m+k)!)
                Complex inner = 0.0;
                double sign = 1.0;
                for (int m = 0; m + k < n; ++m) {
                    double lm;
                    if (m == 0) {
                        lm = lm1;
                    } else if (m == 1) {
                        lm = (1.0 + k - z) * seed;
                    } else {
                        lm = ((2.0 * (m - 1) + k + 1.0 - z) * lm1 - (m - 1.0 + k) * lm2) / m;
                    }
                    inner += std::conj(c[m]) * c[m + k] * (sign * rho * lm);
                    sign = -sign;
                    rho *= std::sqrt((m + 1.0) / (m + 1.0 + k));
                    lm2 = lm1;
                    lm1 = lm;
                }
                Complex term = inner * qk;
                total += (k == 0) ? term.real() : 2.0 * term.real();
            }
            out[static_cast<std::size_t>(j) * grid.nx + i] = two_over_pi * total;
        }
    }
    return out;
}

std::vector<double> wigner_from_xp(const XpGaussianState& s, const WignerGrid& grid) {
    StateMoments m = xp_observables(s);
    const double det = m.var_x * m.var_p - m.cov_xp * m.cov_xp;
    if (!(det > 0.0)) {
        throw ValidityError("wigner_from_xp: singular quadrature covariance");
    }
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
    const double mx = s.alpha.real(), mp = s.alpha.imag();
    std::vector<double> out(grid.size());
    for (int j = 0; j < grid.np; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            double dx = grid.x_at(i) - mx;
            double dp = grid.p_at(j) - mp;
            double q = (m.var_p * dx * dx - 2.0 * m.cov_xp * dx * dp + m.var_x * dp * dp) / det;
            out[static_cast<std::size_t>(j) * grid.nx + i] = norm * std::exp(-0.5 * q);
        }
    }
    return out;
}

std::vector<double> wigner_from_ntheta(const NThetaState& s, const WignerGrid& grid) {
    if (!(s.n > 0.0)) {
        throw ValidityError("wigner_from_ntheta: density must be positive");
    }
    const double det = s.var_n * s.var_theta - s.cov * s.cov;
    if (!(det > 0.0)) {
        throw ValidityError("wigner_from_ntheta: singular (n, theta) covariance");
    }
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> out(grid.size());
    for (int j = 0; j < grid.np; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            double x = grid.x_at(i), p = grid.p_at(j);
            double npt = x * x + p * p;
            double th = std::atan2(p, x);
            // nearest phase branch plus its neighbors
            double k0 = std::round((s.theta - th) / two_pi);
            double val = 0.0;
            for (int w = -1; w <= 1; ++w) {
                double dth = th + (k0 + w) * two_pi - s.theta;
                double dn = npt - s.n;
                double q = (s.var_theta * dn * dn - 2.0 * s.cov * dn * dth +
                            s.var_n * dth * dth) / det;
                val += norm * std::exp(-0.5 * q);
            }
            // dn dtheta = 2 dx dp under n = x^2 + p^2
            out[static_cast<std::size_t>(j) * grid.nx + i] = 2.0 * val;
        }
    }
    return out;
}

} // namespace kerrtraj
