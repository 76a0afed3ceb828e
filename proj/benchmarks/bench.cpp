#include <benchmark/benchmark.h>

#include <cmath>

#include "kerrtraj/fock.hpp"
#include "kerrtraj/gaussian_ntheta.hpp"
#include "kerrtraj/gaussian_xp.hpp"
#include "kerrtraj/liouvillian.hpp"
#include "kerrtraj/rng.hpp"
#include "kerrtraj/twa.hpp"

namespace {

using namespace kerrtraj;

constexpr double kDt = 1e-3;

KerrParams pc_params() { return KerrParams{1.0, 0.05, {2.235, 0.0}}; }
KerrParams het_params() { return KerrParams::heterodyne(1.0, 0.05, {2.235, 0.0}); }

// loose tail threshold: long no-jump stretches drift upward in n and the
// benchmark should measure step cost, not truncation policy
FockSolverOptions bench_fock_options() {
    FockSolverOptions opt;
    opt.tail_threshold = 1e-3;
    return opt;
}

void bm_fock_pc_step(benchmark::State& state) {
    const int n_levels = static_cast<int>(state.range(0));
    FockSolver solver(pc_params(), n_levels, bench_fock_options());
    FockState s = FockState::coherent({2.0, 0.5}, n_levels);
    RngStream rng(7);
    double thr = std::log(rng.uniform());
    for (auto _ : state) {
        auto r = solver.pc_step(s, kDt, thr);
        if (r.jumped) thr = std::log(rng.uniform());
        benchmark::DoNotOptimize(s.amps.data());
    }
}
BENCHMARK(bm_fock_pc_step)->Arg(40)->Arg(80)->Arg(120);

void bm_fock_diffusive_step(benchmark::State& state) {
    const int n_levels = static_cast<int>(state.range(0));
    FockSolver solver(het_params(), n_levels, bench_fock_options());
    FockState s = FockState::coherent({2.0, 0.5}, n_levels);
    RngStream rng(7);
    for (auto _ : state) {
        solver.diffusive_step(s, kDt, sample_noise(rng, kDt, Unraveling::Heterodyne));
        benchmark::DoNotOptimize(s.amps.data());
    }
}
BENCHMARK(bm_fock_diffusive_step)->Arg(40)->Arg(80)->Arg(120);

void bm_xp_pc_step(benchmark::State& state) {
    XpSolver solver(pc_params());
    XpGaussianState s = XpGaussianState::coherent({2.0, 0.5});
    RngStream rng(7);
    double thr = std::log(rng.uniform());
    for (auto _ : state) {
        auto r = solver.pc_step(s, kDt, thr);
        if (r.jumped) thr = std::log(rng.uniform());
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(bm_xp_pc_step);

void bm_xp_heterodyne_step(benchmark::State& state) {
    XpSolver solver(het_params());
    XpGaussianState s = XpGaussianState::coherent({2.0, 0.5});
    RngStream rng(7);
    for (auto _ : state) {
        solver.heterodyne_step(s, kDt, sample_noise(rng, kDt, Unraveling::Heterodyne));
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(bm_xp_heterodyne_step);

void bm_ntheta_pc_step(benchmark::State& state) {
    NThetaSolver solver(pc_params());
    NThetaState s = NThetaState::coherent({5.0, 0.0});
    RngStream rng(7);
    double thr = std::log(rng.uniform());
    int since_reset = 0;
    for (auto _ : state) {
        auto r = solver.pc_step(s, kDt, thr);
        if (r.jumped) thr = std::log(rng.uniform());
        // periodic reset keeps the state in the method's validity range
        if (++since_reset == 200) {
            s = NThetaState::coherent({5.0, 0.0});
            since_reset = 0;
        }
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(bm_ntheta_pc_step);

void bm_ntheta_heterodyne_step(benchmark::State& state) {
    KerrParams p = het_params();
    p.f = {0.0, 0.0};
    NThetaSolver solver(p);
    NThetaState s = NThetaState::coherent({20.0, 0.0});
    RngStream rng(7);
    int since_reset = 0;
    for (auto _ : state) {
        solver.heterodyne_step(s, kDt, sample_noise(rng, kDt, Unraveling::Heterodyne));
        if (++since_reset == 200) {
            s = NThetaState::coherent({20.0, 0.0});
            since_reset = 0;
        }
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(bm_ntheta_heterodyne_step);

void bm_twa_step(benchmark::State& state) {
    KerrParams p = het_params();
    RngStream rng(7);
    TwaSample s = twa_initial_sample({2.0, 0.5}, rng);
    for (auto _ : state) {
        s = twa_step(s, p, kDt, rng);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(bm_twa_step);

void bm_steady_state(benchmark::State& state) {
    const int n_levels = static_cast<int>(state.range(0));
    for (auto _ : state) {
        StateMoments m = lindblad_steady_state(pc_params(), n_levels);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(bm_steady_state)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
