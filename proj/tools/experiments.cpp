#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "kerrtraj/liouvillian.hpp"
#include "kerrtraj/rng.hpp"
#include "kerrtraj/wigner.hpp"
#include "output.hpp"

namespace kerrtraj::cli {

namespace {

std::vector<double> f_sweep(const ExperimentConfig& cfg) {
    std::vector<double> fs(cfg.n_f);
    for (int i = 0; i < cfg.n_f; ++i) {
        fs[i] = cfg.n_f == 1 ? cfg.f_min
                             : cfg.f_min + (cfg.f_max - cfg.f_min) * i / (cfg.n_f - 1);
    }
    return fs;
}

int oracle_levels(const ExperimentConfig& cfg, const KerrParams& p) {
    if (cfg.n_levels > 0) return cfg.n_levels;
    RunSpec probe;
    probe.method = Method::Exact;
    probe.params = p;
    probe.alpha0 = cfg.alpha0();
    return probe.effective_n_levels();
}

// ---------------------------------------------------------------------------

void run_single_traj(const ExperimentConfig& cfg) {
    KerrParams p = cfg.params_for(Unraveling::PhotonCounting);
    RunSpec probe = cfg.base_spec(Method::Exact, Unraveling::PhotonCounting);
    FockSolver fock(p, probe.effective_n_levels());
    XpSolverOptions xopt;
    xopt.closure = SecondMomentClosure::Explicit; // vacuum start
    XpSolver xp(p, xopt);

    FockState fs = cfg.alpha0() == Complex(0.0, 0.0)
                       ? FockState::vacuum(fock.n_levels())
                       : FockState::coherent(cfg.alpha0(), fock.n_levels());
    XpGaussianState gs = XpGaussianState::coherent(cfg.alpha0());

    // both solvers consume the same jump-threshold sequence
    const std::uint64_t seed = derive_trajectory_seed(cfg.seed, 0);
    RngStream rng_e(seed), rng_x(seed);
    double thr_e = std::log(rng_e.uniform());
    double thr_x = std::log(rng_x.uniform());

    Table t;
    t.columns = {"t", "n_exact", "n_xp", "jumps_exact", "jumps_xp"};
    TimeGrid grid = cfg.grid();
    double te = 0.0, tx = 0.0;
    for (double ts : grid.sample_times) {
        int je = 0, jx = 0;
        while (te < ts - 1e-12) {
            auto r = fock.pc_step(fs, std::min(cfg.dt_pc, ts - te), thr_e);
            te += r.t_advanced;
            if (r.jumped) {
                thr_e = std::log(rng_e.uniform());
                ++je;
            }
        }
        while (tx < ts - 1e-12) {
            auto r = xp.pc_step(gs, std::min(cfg.dt_pc, ts - tx), thr_x);
            tx += r.t_advanced;
            if (r.jumped) {
                thr_x = std::log(rng_x.uniform());
                ++jx;
            }
        }
        t.add_row({ts, fock_expectations(fs).mean_n, gs.mean_n(), double(je), double(jx)});
    }
    write_table(t, cfg);
}

// ---------------------------------------------------------------------------

void run_bistability(const ExperimentConfig& cfg) {
    Table t;
    t.columns = {"f",  "method",   "scheme",   "mean_n", "std_err_n",
                 "g2", "oracle_n", "oracle_g2"};
    for (double fval : f_sweep(cfg)) {
        ExperimentConfig point = cfg;
        point.f_re = fval;
        point.f_im = 0.0;
        StateMoments oracle =
            lindblad_steady_state(point.params_for(Unraveling::PhotonCounting),
                                  oracle_levels(point, point.params_for(Unraveling::PhotonCounting)));
        double og2 = oracle.g2.value_or(std::numeric_limits<double>::quiet_NaN());

        for (const std::string& mname : cfg.methods) {
            Method m = parse_method(mname);
            std::vector<std::string> schemes =
                m == Method::Twa ? std::vector<std::string>{"-"} : cfg.schemes;
            for (const std::string& sname : schemes) {
                Unraveling sch = m == Method::Twa ? Unraveling::Heterodyne : parse_scheme(sname);
                RunSpec spec = point.base_spec(m, sch);
                spec.grid = TimeGrid::uniform(0.0, cfg.t_max, 3);
                EnsembleStats st = variance_decomposition(run_ensemble(spec));
                t.add_row({fval, mname, sname, st.n.mean.back(), st.n.std_error.back(),
                           st.g2.back(), oracle.mean_n, og2});
            }
        }
    }
    write_table(t, cfg);
}

// ---------------------------------------------------------------------------

void diffusion_rows(const ExperimentConfig& cfg, Table& t, bool with_ratio) {
    for (const std::string& mname : cfg.methods) {
        Method m = parse_method(mname);
        std::vector<std::string> schemes =
            m == Method::Twa ? std::vector<std::string>{"-"} : cfg.schemes;
        for (const std::string& sname : schemes) {
            Unraveling sch = m == Method::Twa ? Unraveling::Heterodyne : parse_scheme(sname);
            RunSpec spec = cfg.base_spec(m, sch);
            if (m == Method::Twa && !with_ratio) spec.n_traj = 10 * cfg.n_traj;
            // the reduced-variable closure keeps moderate-density heterodyne
            // trajectories on the pure manifold
            spec.ntheta_options.var_theta_purity_closure = true;
            EnsembleStats st = variance_decomposition(run_ensemble(spec));
            for (std::size_t i = 0; i < st.x.mean.size(); ++i) {
                std::vector<Cell> row = {cfg.grid().sample_times[i],
                                         mname,
                                         sname,
                                         st.x.mean[i],
                                         st.x.var_intra[i],
                                         st.x.var_inter[i],
                                         st.x.var_total[i],
                                         st.x.std_error[i],
                                         st.p.mean[i],
                                         st.p.var_intra[i],
                                         st.p.var_inter[i],
                                         st.p.var_total[i]};
                if (with_ratio) {
                    SampleRatio r = sample_ratio_criterion(st, Observable::X, i);
                    row.push_back(r.infinite ? std::numeric_limits<double>::infinity()
                                             : r.value);
                }
                t.add_row(std::move(row));
            }
        }
    }
}

void run_phase_diffusion(const ExperimentConfig& cfg, bool low_sample) {
    Table t;
    t.columns = {"t",           "method",      "scheme",      "mean_x",
                 "var_intra_x", "var_inter_x", "var_total_x", "std_err_x",
                 "mean_p",      "var_intra_p", "var_inter_p", "var_total_p"};
    if (low_sample) t.columns.push_back("ratio_x");
    diffusion_rows(cfg, t, low_sample);
    write_table(t, cfg);
}

// ---------------------------------------------------------------------------

std::string snapshot_path(const std::string& base, const std::string& method, std::size_t idx) {
    std::string path = base;
    std::string suffix = "." + method + ".s" + std::to_string(idx);
    std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || path.find('/', dot) != std::string::npos) {
        return path + suffix;
    }
    return path.substr(0, dot) + suffix + path.substr(dot);
}

void run_wigner(const ExperimentConfig& cfg) {
    const Unraveling sch = parse_scheme(cfg.schemes.front());
    const WignerGrid grid{cfg.nx, cfg.np, cfg.x_min, cfg.x_max, cfg.p_min, cfg.p_max};
    std::vector<double> times = cfg.snapshot_times;
    std::sort(times.begin(), times.end());

    for (const std::string& mname : cfg.methods) {
        Method m = parse_method(mname);
        if (m == Method::Twa) {
            throw ConfigError("wigner: TWA samples carry no single-trajectory Wigner function");
        }
        KerrParams p = cfg.params_for(sch);
        RunSpec probe = cfg.base_spec(Method::Exact, sch);
        const std::uint64_t seed = derive_trajectory_seed(cfg.seed, 0);
        RngStream rng(seed);
        double thr = std::log(rng.uniform());
        const double dt = sch == Unraveling::PhotonCounting ? cfg.dt_pc : cfg.dt_diffusive;

        FockSolver fock(p, probe.effective_n_levels());
        FockState fs = cfg.alpha0() == Complex(0.0, 0.0)
                           ? FockState::vacuum(fock.n_levels())
                           : FockState::coherent(cfg.alpha0(), fock.n_levels());
        XpSolver xp(p);
        XpGaussianState gs = XpGaussianState::coherent(cfg.alpha0());
        NThetaSolver nt(p);
        NThetaState ns{};
        if (m == Method::NTheta) ns = NThetaState::coherent(cfg.alpha0());

        auto advance = [&](double upto, double& tcur) {
            while (tcur < upto - 1e-12) {
                double h = std::min(dt, upto - tcur);
                if (sch == Unraveling::PhotonCounting) {
                    bool jumped = false;
                    double adv = 0.0;
                    if (m == Method::Exact) {
                        auto r = fock.pc_step(fs, h, thr);
                        jumped = r.jumped;
                        adv = r.t_advanced;
                    } else if (m == Method::Xp) {
                        auto r = xp.pc_step(gs, h, thr);
                        jumped = r.jumped;
                        adv = r.t_advanced;
                    } else {
                        auto r = nt.pc_step(ns, h, thr);
                        jumped = r.jumped;
                        adv = r.t_advanced;
                    }
                    tcur += adv;
                    if (jumped) thr = std::log(rng.uniform());
                } else {
                    NoiseIncrement noise = sample_noise(rng, h, sch);
                    if (m == Method::Exact) {
                        fock.diffusive_step(fs, h, noise);
                    } else if (m == Method::Xp) {
                        xp.heterodyne_step(gs, h, noise);
                    } else {
                        nt.heterodyne_step(ns, h, noise);
                    }
                    tcur += h;
                }
            }
        };

        double tcur = 0.0;
        for (std::size_t si = 0; si < times.size(); ++si) {
            advance(times[si], tcur);
            std::vector<double> w;
            if (m == Method::Exact) {
                w = wigner_from_fock(fs, grid);
            } else if (m == Method::Xp) {
                w = wigner_from_xp(gs, grid);
            } else {
                w = wigner_from_ntheta(ns, grid);
            }
            Table t;
            t.columns = {"x", "p", "w"};
            for (int j = 0; j < grid.np; ++j) {
                for (int i = 0; i < grid.nx; ++i) {
                    t.add_row({grid.x_at(i), grid.p_at(j),
                               w[static_cast<std::size_t>(j) * grid.nx + i]});
                }
            }
            ExperimentConfig meta = cfg;
            meta.snapshot_times = {times[si]};
            write_table(t, meta, snapshot_path(cfg.out, mname, si));
        }
    }
}

// ---------------------------------------------------------------------------

void run_oracle(const ExperimentConfig& cfg) {
    Table t;
    t.columns = {"f",     "mean_n", "g2",     "mean_a_re",
                 "mean_a_im", "var_x", "var_p", "cov_xp"};
    for (double fval : f_sweep(cfg)) {
        ExperimentConfig point = cfg;
        point.f_re = fval;
        point.f_im = 0.0;
        KerrParams p = point.params_for(Unraveling::PhotonCounting);
        StateMoments m = lindblad_steady_state(p, oracle_levels(point, p));
        t.add_row({fval, m.mean_n, m.g2.value_or(std::numeric_limits<double>::quiet_NaN()),
                   m.mean_a.real(), m.mean_a.imag(), m.var_x, m.var_p, m.cov_xp});
    }
    write_table(t, cfg);
}

} // namespace

void run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.kind == "single-traj") {
        run_single_traj(cfg);
    } else if (cfg.kind == "bistability") {
        run_bistability(cfg);
    } else if (cfg.kind == "phase-diffusion") {
        run_phase_diffusion(cfg, false);
    } else if (cfg.kind == "low-sample") {
        run_phase_diffusion(cfg, true);
    } else if (cfg.kind == "wigner") {
        run_wigner(cfg);
    } else {
        run_oracle(cfg);
    }
}

} // namespace kerrtraj::cli
