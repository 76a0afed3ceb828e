#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kerrtraj/ensemble.hpp"

namespace kerrtraj::cli {

using nlohmann::json;

/// Fully serializable experiment description. Every output file embeds the
/// exact config used, so a run can be reproduced from its own artifact.
struct ExperimentConfig {
    std::string kind; // single-traj | bistability | phase-diffusion | low-sample | wigner | oracle

    std::vector<std::string> methods = {"exact"};
    std::vector<std::string> schemes = {"pc"};

    // physics (units of gamma = 1)
    double delta = 1.0;
    double u = 0.05;
    double f_re = 2.235;
    double f_im = 0.0;
    double gamma = 1.0;
    double f_off_time = -1.0; // pump switch-off; < 0 keeps the drive on

    // initial state: vacuum unless |alpha0| > 0
    double alpha0_re = 0.0;
    double alpha0_im = 0.0;

    // time grid and integration
    double t_max = 100.0;
    int n_samples = 101;
    double dt_pc = 1e-3;
    double dt_diffusive = 1e-4;
    double dt_twa = 1e-3;

    // ensemble
    int n_traj = 1000;
    std::uint64_t seed = 1;
    int n_levels = 0; // exact method; 0 = density heuristic
    int workers = 1;
    double failure_budget = 0.01;

    // bistability / oracle sweep
    double f_min = 1.8;
    double f_max = 2.6;
    int n_f = 5;

    // wigner snapshots
    std::vector<double> snapshot_times = {0.0};
    double x_min = -8.0, x_max = 8.0, p_min = -8.0, p_max = 8.0;
    int nx = 101, np = 101;

    // output
    std::string out = "out.csv";
    std::string format = "csv"; // csv | json

    /// Throws ConfigError on any inconsistency, with the offending key named.
    void validate() const;

    Complex f() const { return {f_re, f_im}; }
    Complex alpha0() const { return {alpha0_re, alpha0_im}; }
    KerrParams params_for(Unraveling scheme) const;
    TimeGrid grid() const { return TimeGrid::uniform(0.0, t_max, n_samples); }
    RunSpec base_spec(Method m, Unraveling scheme) const;
};

Method parse_method(const std::string& name);
Unraveling parse_scheme(const std::string& name);

void to_json(json& j, const ExperimentConfig& cfg);
void from_json(const json& j, ExperimentConfig& cfg);

/// Loads a config from a JSON file, or from the metadata header of a
/// previously written CSV/JSON artifact (provenance round-trip).
ExperimentConfig load_config(const std::string& path);

} // namespace kerrtraj::cli
