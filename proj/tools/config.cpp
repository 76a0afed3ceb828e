#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace kerrtraj::cli {

Method parse_method(const std::string& name) {
    if (name == "exact") return Method::Exact;
    if (name == "xp") return Method::Xp;
    if (name == "ntheta") return Method::NTheta;
    if (name == "twa") return Method::Twa;
    throw ConfigError("unknown method '" + name + "' (expected exact|xp|ntheta|twa)");
}

Unraveling parse_scheme(const std::string& name) {
    if (name == "pc") return Unraveling::PhotonCounting;
    if (name == "het") return Unraveling::Heterodyne;
    if (name == "homx") return Unraveling::HomodyneX;
    throw ConfigError("unknown scheme '" + name + "' (expected pc|het|homx)");
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> kinds = {
        "single-traj", "bistability", "phase-diffusion", "low-sample", "wigner", "oracle"};
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
        throw ConfigError("kind: '" + kind +
                          "' is not one of single-traj|bistability|phase-diffusion|"
                          "low-sample|wigner|oracle");
    }
    if (methods.empty()) throw ConfigError("methods: at least one required");
    for (const auto& m : methods) parse_method(m);
    for (const auto& s : schemes) parse_scheme(s);
    if (gamma <= 0.0) throw ConfigError("gamma: must be positive");
    if (t_max <= 0.0) throw ConfigError("t_max: must be positive");
    if (n_samples < 2) throw ConfigError("n_samples: need at least 2");
    if (dt_pc <= 0.0 || dt_diffusive <= 0.0 || dt_twa <= 0.0) {
        throw ConfigError("dt: step sizes must be positive");
    }
    if (n_traj < 1) throw ConfigError("n_traj: must be positive");
    if (workers < 0) throw ConfigError("workers: must be >= 0");
    if (kind == "bistability" || kind == "oracle") {
        if (n_f < 1) throw ConfigError("n_f: must be positive");
        if (n_f > 1 && f_max <= f_min) throw ConfigError("f_max: must exceed f_min");
    }
    if (kind == "wigner") {
        if (snapshot_times.empty()) throw ConfigError("snapshot_times: at least one required");
        for (double t : snapshot_times) {
            if (t < 0.0 || t > t_max) throw ConfigError("snapshot_times: outside [0, t_max]");
        }
        if (nx < 2 || np < 2) throw ConfigError("nx/np: need at least 2 grid points");
        if (x_max <= x_min || p_max <= p_min) throw ConfigError("grid: empty extent");
    }
    if (format != "csv" && format != "json") throw ConfigError("format: must be csv or json");
    if (out.empty()) throw ConfigError("out: output path required");
}

KerrParams ExperimentConfig::params_for(Unraveling scheme) const {
    switch (scheme) {
        case Unraveling::Heterodyne:
            return KerrParams::heterodyne(delta, u, f(), gamma);
        case Unraveling::HomodyneX:
            return KerrParams::homodyne_x(delta, u, f(), gamma);
        case Unraveling::PhotonCounting:
        default:
            return KerrParams{delta, u, f(), gamma, gamma / 2, gamma / 2};
    }
}

RunSpec ExperimentConfig::base_spec(Method m, Unraveling scheme) const {
    RunSpec spec;
    spec.method = m;
    spec.scheme = scheme;
    spec.params = params_for(scheme);
    spec.alpha0 = alpha0();
    spec.grid = grid();
    spec.n_traj = n_traj;
    spec.master_seed = seed;
    spec.dt_pc = dt_pc;
    spec.dt_diffusive = dt_diffusive;
    spec.dt_twa = dt_twa;
    spec.n_levels = n_levels;
    spec.failure_budget = failure_budget;
    spec.workers = workers;
    spec.f_off_time = f_off_time;
    return spec;
}

void to_json(json& j, const ExperimentConfig& c) {
    j = json{{"kind", c.kind},
             {"methods", c.methods},
             {"schemes", c.schemes},
             {"delta", c.delta},
             {"u", c.u},
             {"f_re", c.f_re},
             {"f_im", c.f_im},
             {"gamma", c.gamma},
             {"f_off_time", c.f_off_time},
             {"alpha0_re", c.alpha0_re},
             {"alpha0_im", c.alpha0_im},
             {"t_max", c.t_max},
             {"n_samples", c.n_samples},
             {"dt_pc", c.dt_pc},
             {"dt_diffusive", c.dt_diffusive},
             {"dt_twa", c.dt_twa},
             {"n_traj", c.n_traj},
             {"seed", c.seed},
             {"n_levels", c.n_levels},
             {"workers", c.workers},
             {"failure_budget", c.failure_budget},
             {"f_min", c.f_min},
             {"f_max", c.f_max},
             {"n_f", c.n_f},
             {"snapshot_times", c.snapshot_times},
             {"x_min", c.x_min},
             {"x_max", c.x_max},
             {"p_min", c.p_min},
             {"p_max", c.p_max},
             {"nx", c.nx},
             {"np", c.np},
             {"out", c.out},
             {"format", c.format}};
}

namespace {

template <typename T>
void get_if_present(const json& j, const char* key, T& target) {
    if (auto it = j.find(key); it != j.end()) it->get_to(target);
}

} // namespace

void from_json(const json& j, ExperimentConfig& c) {
    get_if_present(j, "kind", c.kind);
    get_if_present(j, "methods", c.methods);
    get_if_present(j, "schemes", c.schemes);
    get_if_present(j, "delta", c.delta);
    get_if_present(j, "u", c.u);
    get_if_present(j, "f_re", c.f_re);
    get_if_present(j, "f_im", c.f_im);
    get_if_present(j, "gamma", c.gamma);
    get_if_present(j, "f_off_time", c.f_off_time);
    get_if_present(j, "alpha0_re", c.alpha0_re);
    get_if_present(j, "alpha0_im", c.alpha0_im);
    get_if_present(j, "t_max", c.t_max);
    get_if_present(j, "n_samples", c.n_samples);
    get_if_present(j, "dt_pc", c.dt_pc);
    get_if_present(j, "dt_diffusive", c.dt_diffusive);
    get_if_present(j, "dt_twa", c.dt_twa);
    get_if_present(j, "n_traj", c.n_traj);
    get_if_present(j, "seed", c.seed);
    get_if_present(j, "n_levels", c.n_levels);
    get_if_present(j, "workers", c.workers);
    get_if_present(j, "failure_budget", c.failure_budget);
    get_if_present(j, "f_min", c.f_min);
    get_if_present(j, "f_max", c.f_max);
    get_if_present(j, "n_f", c.n_f);
    get_if_present(j, "snapshot_times", c.snapshot_times);
    get_if_present(j, "x_min", c.x_min);
    get_if_present(j, "x_max", c.x_max);
    get_if_present(j, "p_min", c.p_min);
    get_if_present(j, "p_max", c.p_max);
    get_if_present(j, "nx", c.nx);
    get_if_present(j, "np", c.np);
    get_if_present(j, "out", c.out);
    get_if_present(j, "format", c.format);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::string first;
    std::getline(in, first);
    in.seekg(0);

    json j;
    if (!first.empty() && first[0] == '#') {
        // CSV artifact: one of the '# '-prefixed header lines is the metadata JSON
        std::string line;
        while (std::getline(in, line) && !line.empty() && line[0] == '#') {
            std::string body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
            j = json::parse(body, nullptr, /*allow_exceptions=*/false);
            if (j.is_object()) break;
        }
    } else {
        j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    }
    if (j.is_discarded()) throw ConfigError("config: '" + path + "' is not valid JSON");
    if (j.contains("config")) j = j["config"]; // artifact wrapper
    ExperimentConfig cfg;
    try {
        from_json(j, cfg);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

} // namespace kerrtraj::cli
