#include <doctest.h>

#include <cmath>

#include "kerrtraj/fock.hpp"
#include "kerrtraj/rng.hpp"
#include "support.hpp"

using namespace kerrtraj;

TEST_CASE("coherent state moments") {
    const Complex alpha(1.5, -0.8);
    FockState s = FockState::coherent(alpha, 60);
    StateMoments m = fock_expectations(s);
    CHECK(m.mean_n == doctest::Approx(std::norm(alpha)).epsilon(1e-12));
    CHECK(*m.g2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(m.mean_a - alpha) < 1e-12);
    CHECK(m.var_x == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(m.var_p == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(m.cov_xp == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("number state and superposition moments") {
    StateMoments one = fock_expectations(FockState::fock(1, 8));
    CHECK(one.mean_n == doctest::Approx(1.0));
    CHECK(*one.g2 == doctest::Approx(0.0).scale(1.0));
    CHECK(std::abs(one.mean_a) < 1e-15);

    StateMoments vac = fock_expectations(FockState::vacuum(8));
    CHECK(vac.mean_n == doctest::Approx(0.0).scale(1.0));
    CHECK(!vac.g2.has_value()); // absent, not zero

    // (|0> + |2>)/sqrt(2): <n> = 1, <adag adag a a> = 1, g2 = 1
    FockState s = FockState::vacuum(8);
    s.amps[0] = 1.0 / std::sqrt(2.0);
    s.amps[2] = 1.0 / std::sqrt(2.0);
    StateMoments m = fock_expectations(s);
    CHECK(m.mean_n == doctest::Approx(1.0));
    CHECK(m.a4 == doctest::Approx(1.0));
    CHECK(*m.g2 == doctest::Approx(1.0));
}

TEST_CASE("undriven |1> never jumps above threshold and decays its norm") {
    KerrParams p{0.3, 0.1, {0.0, 0.0}};
    FockSolver solver(p, 8);
    FockState s = FockState::fock(1, 8);
    double t = 0.0;
    while (t < 1.0 - 1e-12) {
        auto r = solver.pc_step(s, std::min(1e-2, 1.0 - t), -1e18);
        REQUIRE(!r.jumped);
        t += r.t_advanced;
    }
    // |1> is an n eigenstate: log <1>~ = -gamma t exactly
    CHECK(s.log_norm == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(fock_expectations(s).mean_n == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coherent state is invariant under photon-counting jumps") {
    // a-eigenstate: every jump reproduces the state, so a single undriven PC
    // trajectory carries the deterministic decay |alpha|^2 e^{-gamma t}.
    KerrParams p{0.0, 0.0, {0.0, 0.0}};
    FockSolver solver(p, 40);
    FockState s = FockState::coherent(2.0, 40);
    RngStream rng(5);
    double t = 0.0, threshold = std::log(rng.uniform());
    int jumps = 0;
    while (t < 1.0 - 1e-12) {
        auto r = solver.pc_step(s, std::min(1e-3, 1.0 - t), threshold);
        t += r.t_advanced;
        if (r.jumped) {
            ++jumps;
            threshold = std::log(rng.uniform());
        }
    }
    CHECK(jumps > 0);
    CHECK(fock_expectations(s).mean_n == doctest::Approx(4.0 * std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("diffusive step keeps the state normalized") {
    KerrParams p = KerrParams::heterodyne(1.0, 0.05, {2.235, 0.0});
    FockSolver solver(p, 60);
    FockState s = FockState::vacuum(60);
    RngStream rng(17);
    for (int i = 0; i < 2000; ++i) {
        solver.diffusive_step(s, 1e-4, sample_noise(rng, 1e-4, Unraveling::Heterodyne));
        REQUIRE(s.norm2() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(fock_expectations(s).mean_n > 0.1);
}

TEST_CASE("truncation overflow raises TruncationError") {
    KerrParams p{0.0, 0.0, {3.0, 0.0}};
    FockSolver solver(p, 6);
    FockState s = FockState::vacuum(6);
    auto run = [&] {
        for (int i = 0; i < 20000; ++i) solver.pc_step(s, 1e-3, -1e18);
    };
    CHECK_THROWS_AS(run(), TruncationError);
}

TEST_CASE("squeezed vacuum fixture matches analytic moments") {
    const double r = 0.6, phi = 0.9;
    FockState s = support::squeezed_vacuum(r, phi, 60);
    support::RawMoments m = support::raw_moments(s);
    CHECK(m.n == doctest::Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-10));
    Complex aa_expect = -std::exp(Complex(0.0, phi)) * std::sinh(r) * std::cosh(r);
    CHECK(std::abs(m.aa - aa_expect) < 1e-10);
    CHECK(std::abs(m.a) < 1e-12);
}

TEST_CASE("displacement fixture shifts the mean field") {
    const Complex alpha(0.7, -1.1);
    FockState s = support::displace(FockState::vacuum(50), alpha);
    support::RawMoments m = support::raw_moments(s);
    CHECK(std::abs(m.a - alpha) < 1e-9);
    CHECK(m.n == doctest::Approx(std::norm(alpha)).epsilon(1e-9));
}
