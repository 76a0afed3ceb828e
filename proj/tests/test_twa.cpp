#include <doctest.h>

#include <cmath>
#include <vector>

#include "kerrtraj/fock.hpp"
#include "kerrtraj/liouvillian.hpp"
#include "kerrtraj/twa.hpp"

using namespace kerrtraj;

TEST_CASE("initial cloud samples the coherent Wigner function") {
    const Complex alpha0(1.0, -2.0);
    RngStream rng(21);
    const int n = 100000;
    std::vector<TwaSample> cloud(n);
    for (auto& s : cloud) s = twa_initial_sample(alpha0, rng);

    Complex mean = 0.0;
    double vx = 0.0;
    for (const auto& s : cloud) {
        mean += s.alpha;
        double d = s.alpha.real() - alpha0.real();
        vx += d * d;
    }
    mean /= static_cast<double>(n);
    vx /= static_cast<double>(n);
    CHECK(std::abs(mean - alpha0) < 3.0 * 0.5 / std::sqrt(static_cast<double>(n)) * 1.5);
    CHECK(vx == doctest::Approx(0.25).epsilon(0.02));

    StateMoments m = twa_observables(cloud);
    CHECK(m.mean_n == doctest::Approx(std::norm(alpha0)).epsilon(0.01));
    CHECK(*m.g2 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(m.var_x == doctest::Approx(0.25).epsilon(0.03));
    CHECK(m.var_p == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("linear cavity evolution matches the coherent-state solution") {
    // For u = 0 the Lindblad solution stays coherent with
    // alpha(t) = alpha_ss + (alpha0 - alpha_ss) e^{(i delta - gamma/2) t}.
    KerrParams p{0.8, 0.0, {1.5, 0.0}};
    const Complex alpha0(0.5, 0.5);
    const double t = 1.0, dt = 1e-3;
    const Complex lam(-0.5 * p.gamma, p.delta);
    const Complex alpha_ss = Complex(0.0, 1.0) * p.f / lam;
    const Complex expect = alpha_ss + (alpha0 - alpha_ss) * std::exp(lam * t);

    RngStream rng(33);
    const int n = 20000;
    std::vector<TwaSample> cloud(n);
    for (auto& s : cloud) s = twa_initial_sample(alpha0, rng);
    const int steps = static_cast<int>(std::lround(t / dt));
    for (auto& s : cloud) {
        for (int k = 0; k < steps; ++k) s = twa_step(s, p, dt, rng);
    }
    StateMoments m = twa_observables(cloud);
    const double se = 0.5 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(m.mean_a - expect) < 3.0 * se * std::sqrt(2.0));
    CHECK(m.mean_n == doctest::Approx(std::norm(expect)).epsilon(0.03));
    CHECK(m.var_x == doctest::Approx(0.25).epsilon(0.05));
    CHECK(m.var_p == doctest::Approx(0.25).epsilon(0.05));
    // g2 is a fourth-moment estimator; MC error dominates at this sample count
    CHECK(*m.g2 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("short-time Kerr evolution tracks the master equation") {
    KerrParams p{1.0, 0.05, {2.235, 0.0}};
    const Complex alpha0(1.3, -0.2);
    const double t = 0.1, dt = 1e-3;

    const int n_levels = 30;
    Liouvillian liou(p, n_levels);
    FockState psi0 = FockState::coherent(alpha0, n_levels);
    Eigen::MatrixXcd rho0(n_levels, n_levels);
    for (int i = 0; i < n_levels; ++i)
        for (int j = 0; j < n_levels; ++j) rho0(i, j) = psi0.amps[i] * std::conj(psi0.amps[j]);
    StateMoments oracle = moments_from_rho(liou.evolve(rho0, t, 1e-3));

    RngStream rng(55);
    const int n = 50000;
    std::vector<TwaSample> cloud(n);
    for (auto& s : cloud) s = twa_initial_sample(alpha0, rng);
    const int steps = static_cast<int>(std::lround(t / dt));
    for (auto& s : cloud) {
        for (int k = 0; k < steps; ++k) s = twa_step(s, p, dt, rng);
    }
    StateMoments m = twa_observables(cloud);
    // 3 sigma MC error plus a small allowance for the cubic-term truncation
    const double se_n = std::sqrt(std::norm(alpha0) / static_cast<double>(n));
    CHECK(std::abs(m.mean_n - oracle.mean_n) < 3.0 * se_n + 0.01);
    CHECK(std::abs(m.mean_a - oracle.mean_a) < 3.0 * se_n + 0.01);
}
