#include "kerrtraj/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace kerrtraj {

const char* to_string(Method m) {
    switch (m) {
        case Method::Exact: return "exact";
        case Method::Xp: return "xp";
        case Method::NTheta: return "ntheta";
        case Method::Twa: return "twa";
    }
    return "?";
}

TimeGrid TimeGrid::uniform(double t0, double t1, int n_samples) {
    if (n_samples < 1 || !(t1 > t0)) {
        throw ConfigError("TimeGrid::uniform: need t1 > t0 and at least one sample");
    }
    TimeGrid g;
    g.t0 = t0;
    g.t1 = t1;
    g.sample_times.resize(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        g.sample_times[k] = (n_samples == 1) ? t1
                                             : t0 + (t1 - t0) * k / (n_samples - 1.0);
    }
    return g;
}

void TimeGrid::validate() const {
    if (sample_times.empty()) throw ConfigError("time grid: no sample times");
    double prev = t0 - 1e-12;
    for (double t : sample_times) {
        if (!(t > prev)) throw ConfigError("time grid: sample times must be strictly ascending");
        prev = t;
    }
    if (sample_times.back() > t1 + 1e-12) {
        throw ConfigError("time grid: sample time beyond t1");
    }
}

namespace {

// Largest real root of the semiclassical steady-state equation
// n ((delta - u n)^2 + gamma^2/4) = |f|^2, used only to size the Fock basis.
double semiclassical_density(const KerrParams& p) {
    const double f2 = std::norm(p.f);
    if (f2 == 0.0) return 0.0;
    auto g = [&](double n) {
        double d = p.delta - p.u * n;
        return n * (d * d + 0.25 * p.gamma * p.gamma) - f2;
    };
    double hi = 1.0;
    while (g(hi) < 0.0) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-9 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return hi;
}

} // namespace

void RunSpec::validate() const {
    params.validate();
    grid.validate();
    if (n_traj < 1) throw ConfigError("run spec: n_traj must be positive");
    if (!(dt_pc > 0.0) || !(dt_diffusive > 0.0) || !(dt_twa > 0.0)) {
        throw ConfigError("run spec: step sizes must be positive");
    }
    if (failure_budget < 0.0 || failure_budget > 1.0) {
        throw ConfigError("run spec: failure budget must lie in [0, 1]");
    }
    if (workers < 0) throw ConfigError("run spec: workers must be nonnegative");
    if (scheme == Unraveling::HomodyneX && (method == Method::Xp || method == Method::NTheta)) {
        throw ConfigError("run spec: homodyne-X is only available for the exact method");
    }
    if (method == Method::NTheta && std::norm(alpha0) <= ntheta_options.n_min) {
        throw ConfigError("run spec: ntheta initial density is below the validity floor");
    }
}

int RunSpec::effective_n_levels() const {
    if (n_levels > 0) return n_levels;
    double n_est = std::max(std::norm(alpha0), semiclassical_density(params));
    return static_cast<int>(std::lround(4.0 * n_est)) + 40;
}

namespace {

StateMoments twa_point_moments(const TwaSample& s) {
    StateMoments m;
    double w2 = std::norm(s.alpha);
    set_g2(m, w2 - 0.5, w2 * w2 - 2.0 * w2 + 0.5);
    m.mean_a = s.alpha;
    m.var_x = m.var_p = m.cov_xp = 0.0;
    return m;
}

// Photon-counting loop shared by the exact and Gaussian methods. `step`
// is called as step(state, t, dt, log_threshold) and must return a
// {jumped, t_advanced} pair; `measure` maps the state to StateMoments.
template <class State, class Step, class Measure>
void run_pc_loop(TrajectoryRecord& rec, const RunSpec& spec, RngStream& rng, State& state,
                 Step&& step, Measure&& measure) {
    double t = spec.grid.t0;
    double log_threshold = std::log(rng.uniform());
    for (double ts : spec.grid.sample_times) {
        while (t < ts - 1e-15) {
            double dt = std::min(spec.dt_pc, ts - t);
            if (spec.f_off_time >= 0.0 && t < spec.f_off_time && t + dt > spec.f_off_time) {
                dt = spec.f_off_time - t;
            }
            auto r = step(state, t, dt, log_threshold);
            t += r.t_advanced;
            if (r.jumped) {
                rec.jump_times.push_back(t);
                log_threshold = std::log(rng.uniform());
            }
        }
        rec.moments.push_back(measure(state));
    }
}

template <class State, class Step, class Measure>
void run_diffusive_loop(TrajectoryRecord& rec, const RunSpec& spec, RngStream& rng,
                        State& state, Step&& step, Measure&& measure) {
    double t = spec.grid.t0;
    for (double ts : spec.grid.sample_times) {
        while (t < ts - 1e-15) {
            double dt = std::min(spec.dt_diffusive, ts - t);
            if (spec.f_off_time >= 0.0 && t < spec.f_off_time && t + dt > spec.f_off_time) {
                dt = spec.f_off_time - t;
            }
            NoiseIncrement noise = sample_noise(rng, dt, spec.scheme);
            step(state, t, dt, noise);
            t += dt;
        }
        rec.moments.push_back(measure(state));
    }
}

KerrParams pump_off(KerrParams p) {
    p.f = Complex(0.0, 0.0);
    return p;
}

void run_one(const RunSpec& spec, std::uint64_t index, TrajectoryRecord& rec) {
    rec.method = spec.method;
    rec.scheme = spec.scheme;
    rec.seed = derive_trajectory_seed(spec.master_seed, index);
    rec.has_intra_variance = (spec.method != Method::Twa);
    RngStream rng(rec.seed);
    const bool pc = (spec.scheme == Unraveling::PhotonCounting);
    const bool has_off = spec.f_off_time >= 0.0;
    const KerrParams off = pump_off(spec.params);

    try {
        switch (spec.method) {
            case Method::Exact: {
                const int n_levels = spec.effective_n_levels();
                FockSolver on(spec.params, n_levels, spec.fock_options);
                FockSolver off_s(off, n_levels, spec.fock_options);
                auto pick = [&](double t) -> FockSolver& {
                    return (has_off && t >= spec.f_off_time) ? off_s : on;
                };
                FockState state = FockState::coherent(spec.alpha0, n_levels);
                auto measure = [](const FockState& s) { return fock_expectations(s); };
                if (pc) {
                    run_pc_loop(rec, spec, rng, state,
                                [&](FockState& s, double t, double dt, double lth) {
                                    return pick(t).pc_step(s, dt, lth);
                                },
                                measure);
                } else {
                    run_diffusive_loop(rec, spec, rng, state,
                                       [&](FockState& s, double t, double dt,
                                           const NoiseIncrement& z) {
                                           pick(t).diffusive_step(s, dt, z);
                                       },
                                       measure);
                }
                break;
            }
            case Method::Xp: {
                XpSolver on(spec.params, spec.xp_options);
                XpSolver off_s(off, spec.xp_options);
                auto pick = [&](double t) -> XpSolver& {
                    return (has_off && t >= spec.f_off_time) ? off_s : on;
                };
                XpGaussianState state = XpGaussianState::coherent(spec.alpha0);
                auto measure = [](const XpGaussianState& s) { return xp_observables(s); };
                if (pc) {
                    run_pc_loop(rec, spec, rng, state,
                                [&](XpGaussianState& s, double t, double dt, double lth) {
                                    return pick(t).pc_step(s, dt, lth);
                                },
                                measure);
                } else {
                    run_diffusive_loop(rec, spec, rng, state,
                                       [&](XpGaussianState& s, double t, double dt,
                                           const NoiseIncrement& z) {
                                           pick(t).heterodyne_step(s, dt, z);
                                       },
                                       measure);
                }
                break;
            }
            case Method::NTheta: {
                NThetaSolver on(spec.params, spec.ntheta_options);
                NThetaSolver off_s(off, spec.ntheta_options);
                auto pick = [&](double t) -> NThetaSolver& {
                    return (has_off && t >= spec.f_off_time) ? off_s : on;
                };
                NThetaState state = NThetaState::coherent(spec.alpha0);
                auto measure = [](const NThetaState& s) { return ntheta_quadratures(s); };
                if (pc) {
                    run_pc_loop(rec, spec, rng, state,
                                [&](NThetaState& s, double t, double dt, double lth) {
                                    return pick(t).pc_step(s, dt, lth);
                                },
                                measure);
                } else {
                    run_diffusive_loop(rec, spec, rng, state,
                                       [&](NThetaState& s, double t, double dt,
                                           const NoiseIncrement& z) {
                                           pick(t).heterodyne_step(s, dt, z);
                                       },
                                       measure);
                }
                break;
            }
            case Method::Twa: {
                TwaSample s = twa_initial_sample(spec.alpha0, rng);
                double t = spec.grid.t0;
                for (double ts : spec.grid.sample_times) {
                    while (t < ts - 1e-15) {
                        double dt = std::min(spec.dt_twa, ts - t);
                        if (has_off && t < spec.f_off_time && t + dt > spec.f_off_time) {
                            dt = spec.f_off_time - t;
                        }
                        const KerrParams& p =
                            (has_off && t >= spec.f_off_time) ? off : spec.params;
                        s = twa_step(s, p, dt, rng);
                        t += dt;
                    }
                    rec.moments.push_back(twa_point_moments(s));
                }
                break;
            }
        }
    } catch (const TruncationError& e) {
        rec.failed = true;
        rec.failure_reason = e.what();
    } catch (const ValidityError& e) {
        rec.failed = true;
        rec.failure_reason = e.what();
    }
}

} // namespace

std::vector<TrajectoryRecord> run_ensemble(const RunSpec& spec) {
    spec.validate();
    std::vector<TrajectoryRecord> records(spec.n_traj);

    int workers = spec.workers;
    if (workers == 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers < 1) workers = 1;
    }
    workers = std::min(workers, spec.n_traj);

    if (workers == 1) {
        for (int k = 0; k < spec.n_traj; ++k) {
            run_one(spec, static_cast<std::uint64_t>(k), records[k]);
        }
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (;;) {
                int k = next.fetch_add(1);
                if (k >= spec.n_traj) return;
                run_one(spec, static_cast<std::uint64_t>(k), records[k]);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    int n_failed = 0;
    for (const auto& r : records) n_failed += r.failed ? 1 : 0;
    if (n_failed > spec.failure_budget * spec.n_traj) {
        std::string first_reason;
        for (const auto& r : records) {
            if (r.failed) {
                first_reason = r.failure_reason;
                break;
            }
        }
        std::ostringstream err;
        err << n_failed << " of " << spec.n_traj
            << " trajectories aborted, exceeding the failure budget; first reason: "
            << first_reason;
        throw ValidityError(err.str());
    }
    return records;
}

namespace {

double intra_variance(const StateMoments& m, Observable obs) {
    switch (obs) {
        case Observable::N:
            // <n^2> - <n>^2 = a4 + <n> - <n>^2
            return m.a4 + m.mean_n - m.mean_n * m.mean_n;
        case Observable::X:
            return m.var_x;
        case Observable::P:
            return m.var_p;
    }
    return 0.0;
}

double mean_value(const StateMoments& m, Observable obs) {
    switch (obs) {
        case Observable::N: return m.mean_n;
        case Observable::X: return m.mean_a.real();
        case Observable::P: return m.mean_a.imag();
    }
    return 0.0;
}

} // namespace

EnsembleStats variance_decomposition(const std::vector<TrajectoryRecord>& records) {
    std::vector<const TrajectoryRecord*> ok;
    int n_failed = 0;
    for (const auto& r : records) {
        if (r.failed) {
            ++n_failed;
        } else {
            ok.push_back(&r);
        }
    }
    if (ok.size() < 2) {
        throw ConfigError("variance decomposition: need at least two successful trajectories");
    }
    const std::size_t n_times = ok.front()->moments.size();
    for (const auto* r : ok) {
        if (r->moments.size() != n_times) {
            throw ConfigError("variance decomposition: trajectories recorded on different grids");
        }
    }

    EnsembleStats st;
    st.n_used = static_cast<int>(ok.size());
    st.n_failed = n_failed;
    const double inv = 1.0 / st.n_used;

    for (ObservableStats* o : {&st.n, &st.x, &st.p}) {
        o->mean.resize(n_times);
        o->var_total.resize(n_times);
        o->var_intra.resize(n_times);
        o->var_inter.resize(n_times);
        o->std_error.resize(n_times);
    }
    st.mean_a.resize(n_times);
    st.g2.resize(n_times);

    const Observable all[] = {Observable::N, Observable::X, Observable::P};
    for (std::size_t ti = 0; ti < n_times; ++ti) {
        for (Observable obs : all) {
            ObservableStats& o = const_cast<ObservableStats&>(stats_for(st, obs));
            double m1 = 0.0, m2 = 0.0, intra = 0.0;
            for (const auto* r : ok) {
                const StateMoments& m = r->moments[ti];
                double v = mean_value(m, obs);
                m1 += v;
                m2 += v * v;
                if (r->has_intra_variance) intra += intra_variance(m, obs);
            }
            m1 *= inv;
            m2 *= inv;
            intra *= inv;
            double inter = std::max(0.0, m2 - m1 * m1);
            o.mean[ti] = m1;
            o.var_intra[ti] = intra;
            o.var_inter[ti] = inter;
            o.var_total[ti] = intra + inter;
            o.std_error[ti] = std::sqrt(inter * inv);
        }
        Complex a = 0.0;
        double a4 = 0.0;
        for (const auto* r : ok) {
            a += r->moments[ti].mean_a;
            a4 += r->moments[ti].a4;
        }
        st.mean_a[ti] = a * inv;
        a4 *= inv;
        double mn = st.n.mean[ti];
        st.g2[ti] = (mn > 0.0) ? a4 / (mn * mn)
                               : std::numeric_limits<double>::quiet_NaN();
    }
    return st;
}

const ObservableStats& stats_for(const EnsembleStats& stats, Observable obs) {
    switch (obs) {
        case Observable::N: return stats.n;
        case Observable::X: return stats.x;
        case Observable::P: return stats.p;
    }
    return stats.n;
}

SampleRatio sample_ratio_criterion(const EnsembleStats& stats, Observable obs,
                                   std::size_t time_index) {
    const ObservableStats& o = stats_for(stats, obs);
    double intra = o.var_intra.at(time_index);
    double inter = o.var_inter.at(time_index);
    if (!(inter > 0.0)) {
        return {std::numeric_limits<double>::infinity(), true};
    }
    return {1.0 + intra / inter, false};
}

} // namespace kerrtraj
