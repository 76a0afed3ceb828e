#include <doctest.h>

#include <cmath>

#include "kerrtraj/gaussian_xp.hpp"
#include "kerrtraj/rng.hpp"
#include "support.hpp"

using namespace kerrtraj;

namespace {

XpGaussianState generic_pure_state() {
    XpGaussianState s;
    s.alpha = Complex(1.0, 0.5);
    s.dd = Complex(0.1, -0.2);
    s.nd = nd_from_purity(s.dd);
    return s;
}

} // namespace

TEST_CASE("nd_from_purity solves the quadratic") {
    CHECK(nd_from_purity(Complex(0.3, 0.0)) ==
          doctest::Approx(0.5 * (-1.0 + std::sqrt(1.36))).epsilon(1e-15));
    XpGaussianState s = generic_pure_state();
    CHECK(s.purity_residual() == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(s.purity() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Fock embedding reproduces the Gaussian moments") {
    XpGaussianState g = generic_pure_state();
    FockState f = support::embed_xp(g, 80);
    support::RawMoments m = support::raw_moments(f);
    CHECK(std::abs(m.a - g.alpha) < 1e-9);
    CHECK(std::abs((m.aa - m.a * m.a) - g.dd) < 1e-9);
    CHECK(m.n - std::norm(m.a) == doctest::Approx(g.nd).epsilon(1e-9));
}

TEST_CASE("observables against the embedded state") {
    XpGaussianState g = generic_pure_state();
    StateMoments gm = xp_observables(g);
    StateMoments fm = fock_expectations(support::embed_xp(g, 80));
    CHECK(gm.mean_n == doctest::Approx(fm.mean_n).epsilon(1e-9));
    CHECK(gm.var_x == doctest::Approx(fm.var_x).epsilon(1e-9));
    CHECK(gm.var_p == doctest::Approx(fm.var_p).epsilon(1e-9));
    CHECK(gm.cov_xp == doctest::Approx(fm.cov_xp).epsilon(1e-9));
    // Wick closure of <adag adag a a> is exact on a Gaussian state
    CHECK(gm.a4 == doctest::Approx(fm.a4).epsilon(1e-8));
    CHECK(*gm.g2 == doctest::Approx(*fm.g2).epsilon(1e-8));
}

TEST_CASE("deterministic drift against the exact-evolution oracle") {
    // The exact expectation-value derivatives under the (unnormalized) PC
    // evolution, evaluated on an embedded Gaussian state, must match the
    // Wick-closed equations exactly: the closure truncates third cumulants
    // and a pure Gaussian state has none.
    KerrParams p{1.0, 0.05, {2.235, 0.0}};
    XpGaussianState g = generic_pure_state();
    FockState f = support::embed_xp(g, 100);
    support::RawMoments d = support::pc_derivative(f, p);

    XpDerivative xd = xp_pc_drift(g, p);
    Complex dalpha_oracle = d.a;
    Complex ddd_oracle = d.aa - 2.0 * g.alpha * d.a;
    double dnd_oracle = d.n - 2.0 * std::real(std::conj(g.alpha) * d.a);

    CHECK(std::abs(xd.dalpha - dalpha_oracle) < 1e-6);
    CHECK(std::abs(xd.ddd - ddd_oracle) < 1e-6);
    CHECK(xd.dnd == doctest::Approx(dnd_oracle).epsilon(1e-6));
    CHECK(xd.dlog_norm == doctest::Approx(-p.gamma * (std::norm(g.alpha) + g.nd)).epsilon(1e-12));
}

TEST_CASE("jump map against the exact a-jump on the embedded state") {
    XpGaussianState g = generic_pure_state();
    FockState f = support::embed_xp(g, 80);
    // apply a and renormalize
    for (int k = 0; k + 1 < f.n_levels(); ++k) {
        f.amps[k] = std::sqrt(k + 1.0) * f.amps[k + 1];
    }
    f.amps[f.n_levels() - 1] = 0.0;
    f.renormalize();
    support::RawMoments m = support::raw_moments(f);

    XpGaussianState j = xp_pc_jump(g);
    CHECK(std::abs(j.alpha - m.a) < 1e-8);
    CHECK(std::abs(j.dd - (m.aa - m.a * m.a)) < 1e-8);
    CHECK(j.nd == doctest::Approx(m.n - std::norm(m.a)).epsilon(1e-7));
}

TEST_CASE("purity relation is preserved by explicit second-moment evolution") {
    KerrParams p{1.0, 0.05, {2.235, 0.0}};
    XpSolverOptions opt;
    opt.closure = SecondMomentClosure::Explicit;
    XpSolver solver(p, opt);
    XpGaussianState s = generic_pure_state();
    for (int i = 0; i < 2000; ++i) {
        auto r = solver.pc_step(s, 1e-3, -1e18);
        REQUIRE(!r.jumped);
        REQUIRE(std::abs(s.purity_residual()) < 1e-8);
    }
}

TEST_CASE("heterodyne noise enters only the mean field within a step") {
    // (over multiple steps the second moments pick up noise indirectly,
    // through their Kerr coupling to the diffusing mean field)
    KerrParams p = KerrParams::heterodyne(1.0, 0.05, {2.235, 0.0});
    XpSolver solver(p);
    XpGaussianState a = generic_pure_state();
    XpGaussianState b = a;
    RngStream r1(1), r2(999);
    solver.heterodyne_step(a, 1e-4, sample_noise(r1, 1e-4, Unraveling::Heterodyne));
    solver.heterodyne_step(b, 1e-4, sample_noise(r2, 1e-4, Unraveling::Heterodyne));
    CHECK(a.nd == doctest::Approx(b.nd).epsilon(1e-14));
    CHECK(std::abs(a.dd - b.dd) < 1e-14);
    CHECK(std::abs(a.alpha - b.alpha) > 1e-4); // the mean field does diffuse
}

TEST_CASE("linear cavity: fluctuations stay vacuum") {
    KerrParams p = KerrParams::heterodyne(0.8, 0.0, {1.5, 0.0});
    XpSolver solver(p);
    XpGaussianState s = XpGaussianState::coherent(Complex(0.0, 0.0));
    RngStream rng(42);
    for (int i = 0; i < 1000; ++i) {
        solver.heterodyne_step(s, 1e-3, sample_noise(rng, 1e-3, Unraveling::Heterodyne));
    }
    CHECK(std::abs(s.dd) < 1e-12);
    CHECK(s.nd == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("jump purity residual decays as the inverse sixth power of alpha") {
    // On the pure manifold the |alpha|^-4 and |alpha|^-5 contributions to the
    // post-jump residual cancel identically, so for fixed squeezed covariance
    // the log-log slope vs |alpha| is -6 (faster than the generic bound).
    auto residual_at = [](double amag) {
        XpGaussianState s;
        s.alpha = Complex(amag, 0.3 * amag);
        s.dd = Complex(0.25, -0.15);
        s.nd = nd_from_purity(s.dd);
        return std::abs(xp_pc_jump(s).purity_residual());
    };
    double lo = residual_at(4.0), hi = residual_at(32.0);
    double slope = (std::log(hi) - std::log(lo)) / (std::log(32.0) - std::log(4.0));
    CHECK(slope == doctest::Approx(-6.0).epsilon(0.02));
}
