#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiments.hpp"

namespace {

using kerrtraj::cli::ExperimentConfig;

// exit codes
constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kValidity = 3;
constexpr int kTruncation = 4;

struct Overrides {
    std::vector<std::string> methods, schemes;
    std::string config_path, out, format;
    int n_traj = 0, n_levels = -1, workers = -1, n_samples = 0, n_f = 0;
    std::uint64_t seed = 0;
    double dt = 0.0, t_max = 0.0;
    double delta = 0.0, u = 0.0, f_re = 0.0, f_off = 0.0;
    double alpha0_re = 0.0, alpha0_im = 0.0;
    double f_min = 0.0, f_max = 0.0;
    std::vector<double> snapshots;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path,
                    "JSON config file (a previous output artifact also works)");
    cmd->add_option("--method", o.methods, "method(s): exact|xp|ntheta|twa");
    cmd->add_option("--scheme", o.schemes, "scheme(s): pc|het|homx");
    cmd->add_option("--n-traj", o.n_traj, "trajectories per ensemble");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--dt", o.dt, "step size for all integrators");
    cmd->add_option("--n-levels", o.n_levels, "Fock truncation (0 = heuristic)");
    cmd->add_option("--t-max", o.t_max, "final time");
    cmd->add_option("--n-samples", o.n_samples, "sample times on [0, t_max]");
    cmd->add_option("--out", o.out, "output path");
    cmd->add_option("--format", o.format, "csv|json");
    cmd->add_option("--workers", o.workers, "worker threads (0 = hardware)");
    cmd->add_option("--delta", o.delta, "detuning");
    cmd->add_option("--u", o.u, "Kerr strength");
    cmd->add_option("--f", o.f_re, "drive amplitude (real)");
    cmd->add_option("--f-off-time", o.f_off, "pump switch-off time (< 0 keeps it on)");
    cmd->add_option("--alpha0-re", o.alpha0_re, "initial coherent amplitude, real part");
    cmd->add_option("--alpha0-im", o.alpha0_im, "initial coherent amplitude, imaginary part");
    cmd->add_option("--f-min", o.f_min, "sweep start");
    cmd->add_option("--f-max", o.f_max, "sweep end");
    cmd->add_option("--n-f", o.n_f, "sweep points");
    cmd->add_option("--snapshot", o.snapshots, "wigner snapshot time(s)");
}

ExperimentConfig defaults_for(const std::string& kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    if (kind == "single-traj") {
        cfg.methods = {"exact", "xp"};
        cfg.t_max = 15.0;
        cfg.n_samples = 301;
        cfg.n_traj = 1;
    } else if (kind == "bistability") {
        cfg.methods = {"xp", "twa"};
        cfg.t_max = 100.0;
        cfg.n_samples = 3;
        cfg.n_traj = 10000;
    } else if (kind == "phase-diffusion" || kind == "low-sample") {
        cfg.methods = {"exact", "xp", "ntheta", "twa"};
        cfg.schemes = {"het"};
        cfg.u = 1.0;
        cfg.delta = 100.0;
        cfg.f_re = 0.0;
        cfg.alpha0_re = 10.0;
        cfg.t_max = 0.5;
        cfg.n_samples = 51;
        cfg.n_traj = kind == "low-sample" ? 10 : 1000;
    } else if (kind == "wigner") {
        cfg.methods = {"exact"};
        cfg.u = 1.0;
        cfg.delta = 100.0;
        cfg.f_re = 0.0;
        cfg.alpha0_re = 10.0;
        cfg.t_max = 0.5;
        cfg.dt_pc = 1e-4; // stiff default regime: RK4 needs dt < ~3/(delta n_levels)
        cfg.snapshot_times = {0.0, 0.1, 0.2};
        cfg.x_min = cfg.p_min = -12.0;
        cfg.x_max = cfg.p_max = 12.0;
    } else if (kind == "oracle") {
        cfg.n_levels = 120;
    }
    return cfg;
}

ExperimentConfig build_config(const std::string& kind, const CLI::App* cmd, const Overrides& o) {
    ExperimentConfig cfg = o.config_path.empty() ? defaults_for(kind)
                                                 : kerrtraj::cli::load_config(o.config_path);
    cfg.kind = kind;
    auto given = [&](const char* flag) { return cmd->count(flag) > 0; };
    if (given("--method")) cfg.methods = o.methods;
    if (given("--scheme")) cfg.schemes = o.schemes;
    if (given("--n-traj")) cfg.n_traj = o.n_traj;
    if (given("--seed")) cfg.seed = o.seed;
    if (given("--dt")) cfg.dt_pc = cfg.dt_diffusive = cfg.dt_twa = o.dt;
    if (given("--n-levels")) cfg.n_levels = o.n_levels;
    if (given("--t-max")) cfg.t_max = o.t_max;
    if (given("--n-samples")) cfg.n_samples = o.n_samples;
    if (given("--out")) cfg.out = o.out;
    if (given("--format")) cfg.format = o.format;
    if (given("--workers")) cfg.workers = o.workers;
    if (given("--delta")) cfg.delta = o.delta;
    if (given("--u")) cfg.u = o.u;
    if (given("--f")) cfg.f_re = o.f_re, cfg.f_im = 0.0;
    if (given("--f-off-time")) cfg.f_off_time = o.f_off;
    if (given("--alpha0-re")) cfg.alpha0_re = o.alpha0_re;
    if (given("--alpha0-im")) cfg.alpha0_im = o.alpha0_im;
    if (given("--f-min")) cfg.f_min = o.f_min;
    if (given("--f-max")) cfg.f_max = o.f_max;
    if (given("--n-f")) cfg.n_f = o.n_f;
    if (given("--snapshot")) cfg.snapshot_times = o.snapshots;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-trajectory experiments for the driven-dissipative Kerr cavity"};
    app.require_subcommand(1);

    const std::vector<std::string> kinds = {"single-traj",  "bistability", "phase-diffusion",
                                            "low-sample",   "wigner",      "oracle"};
    std::vector<Overrides> overrides(kinds.size());
    std::vector<CLI::App*> cmds;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        CLI::App* cmd = app.add_subcommand(kinds[i]);
        add_common(cmd, overrides[i]);
        cmds.push_back(cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (!cmds[i]->parsed()) continue;
        try {
            ExperimentConfig cfg = build_config(kinds[i], cmds[i], overrides[i]);
            kerrtraj::cli::run_experiment(cfg);
            return kOk;
        } catch (const kerrtraj::ConfigError& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return kConfig;
        } catch (const kerrtraj::ValidityError& e) {
            std::fprintf(stderr, "validity abort: %s\n", e.what());
            return kValidity;
        } catch (const kerrtraj::TruncationError& e) {
            std::fprintf(stderr, "truncation error: %s\n", e.what());
            return kTruncation;
        }
    }
    return kConfig;
}
