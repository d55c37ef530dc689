#ifndef GEVREY_NS_RUN_CONFIG_HPP
#define GEVREY_NS_RUN_CONFIG_HPP

// JSON run configuration shared by every verifier subcommand. Unknown keys
// are rejected at every nesting level.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gevrey_ns/derivative_engine.hpp"
#include "gevrey_ns/errors.hpp"
#include "gevrey_ns/ns_solver.hpp"
#include "gevrey_ns/spectral_core.hpp"

namespace gevrey_ns {

struct C0Config {
    bool estimate = true;
    double value = 0.0; // used when estimate == false
    int grid = 32;
    int samples = 4;
    int steps = 300;
    int band = 0;
};

struct InitialConfig {
    InitialDataSpec spec = TaylorGreen{};
    /// Rescale the data to this L2 norm.
    std::optional<double> l2_norm;
    /// Rescale the data so that 8 C0 C_alpha ||u0|| equals this value.
    std::optional<double> smallness;
};

struct RunConfig {
    SolverConfig solver;
    InitialConfig initial;
    int stack_depth = 8;
    int truncation = 40;
    std::vector<double> alphas{1.0};
    std::uint64_t seed = 7;
    C0Config c0;

    int theorem2_n_max = 4;
    int theorem3_steps = 64;
    double theorem4_window_a = 1.0;
    double theorem4_window_b = 5.0;
    std::optional<double> theorem4_gamma;

    std::vector<double> stokes_times{0.1, 1.0, 5.0};
    double stokes_tolerance = 1e-8;

    std::optional<double> fd_time;
    std::vector<double> fd_steps{1e-2, 5e-3, 2.5e-3};
    int fd_order = 1;

    int audit_k_max = 20;
    std::vector<double> audit_alphas{0.5, 1.0, 2.0};
    int audit_trials = 10000;
    int audit_n_max = 32;

    double energy_tol = 1e-7;
    std::string output_dir = "out";
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) {
        throw config_error(where + " must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (allowed.count(key) == 0) {
            throw config_error("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error("bad value for '" + std::string(key) + "' in " + where);
    }
}

inline InitialConfig parse_initial(const json& j, std::uint64_t default_seed)
{
    const std::string where = "initial";
    reject_unknown(j, {"type", "amplitude", "decay", "k_max", "seed", "l2_norm", "smallness"}, where);
    std::string type = "taylor_green";
    read(j, "type", type, where);
    InitialConfig ic;
    if (type == "taylor_green" || type == "shear") {
        for (const char* k : {"decay", "k_max", "seed"}) {
            if (j.contains(k)) {
                throw config_error("key '" + std::string(k) + "' does not apply to " + type + " data");
            }
        }
        double a = 1.0;
        read(j, "amplitude", a, where);
        ic.spec = type == "shear" ? InitialDataSpec{Shear{a}} : InitialDataSpec{TaylorGreen{a}};
    } else if (type == "random") {
        if (j.contains("amplitude")) {
            throw config_error("random data is scaled with l2_norm or smallness, not amplitude");
        }
        RandomSpectrum r;
        r.seed = default_seed;
        read(j, "decay", r.decay, where);
        read(j, "k_max", r.k_max, where);
        read(j, "seed", r.seed, where);
        ic.spec = r;
    } else {
        throw config_error("initial.type must be taylor_green, shear or random");
    }
    if (j.contains("l2_norm")) {
        double v = 0.0;
        read(j, "l2_norm", v, where);
        if (!(v > 0.0)) {
            throw config_error("initial.l2_norm must be positive");
        }
        ic.l2_norm = v;
    }
    if (j.contains("smallness")) {
        double v = 0.0;
        read(j, "smallness", v, where);
        if (!(v > 0.0)) {
            throw config_error("initial.smallness must be positive");
        }
        ic.smallness = v;
    }
    if (ic.l2_norm && ic.smallness) {
        throw config_error("initial.l2_norm and initial.smallness are exclusive");
    }
    return ic;
}

inline void parse_snapshots(const json& j, SolverConfig& s)
{
    reject_unknown(j, {"times", "schedule"}, "snapshots");
    if (j.contains("times") && j.contains("schedule")) {
        throw config_error("snapshots.times and snapshots.schedule are exclusive");
    }
    read(j, "times", s.snapshot_times, "snapshots");
    if (j.contains("schedule")) {
        if (!j.at("schedule").is_array()) {
            throw config_error("snapshots.schedule must be an array");
        }
        for (const auto& seg : j.at("schedule")) {
            reject_unknown(seg, {"until", "stride"}, "snapshots.schedule entry");
            ScheduleSegment ss;
            read(seg, "until", ss.until, "snapshots.schedule entry");
            read(seg, "stride", ss.stride, "snapshots.schedule entry");
            s.schedule.push_back(ss);
        }
    }
}

} // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j)
{
    using detail::read;
    using detail::reject_unknown;
    reject_unknown(j,
                   {"grid", "dt", "t_end", "snapshots", "stability_guard", "cfl", "initial", "stack_depth",
                    "truncation", "alpha", "seed", "c0", "theorem2", "theorem3", "theorem4", "stokes", "fd", "audit",
                    "energy_tol", "output_dir"},
                   "config");
    RunConfig c;
    read(j, "grid", c.solver.n, "config");
    read(j, "dt", c.solver.dt, "config");
    read(j, "t_end", c.solver.t_end, "config");
    read(j, "stability_guard", c.solver.stability_guard, "config");
    read(j, "cfl", c.solver.cfl, "config");
    read(j, "stack_depth", c.stack_depth, "config");
    read(j, "truncation", c.truncation, "config");
    read(j, "seed", c.seed, "config");
    read(j, "energy_tol", c.energy_tol, "config");
    read(j, "output_dir", c.output_dir, "config");
    if (j.contains("alpha")) {
        if (j.at("alpha").is_number()) {
            c.alphas = {j.at("alpha").get<double>()};
        } else {
            read(j, "alpha", c.alphas, "config");
        }
    }
    if (j.contains("snapshots")) {
        detail::parse_snapshots(j.at("snapshots"), c.solver);
    }
    c.initial = detail::parse_initial(j.contains("initial") ? j.at("initial") : nlohmann::json::object(), c.seed);
    if (j.contains("c0")) {
        const auto& cj = j.at("c0");
        reject_unknown(cj, {"mode", "value", "grid", "samples", "steps", "band"}, "c0");
        std::string mode = "estimate";
        read(cj, "mode", mode, "c0");
        if (mode != "estimate" && mode != "fixed") {
            throw config_error("c0.mode must be estimate or fixed");
        }
        c.c0.estimate = mode == "estimate";
        read(cj, "value", c.c0.value, "c0");
        read(cj, "grid", c.c0.grid, "c0");
        read(cj, "samples", c.c0.samples, "c0");
        read(cj, "steps", c.c0.steps, "c0");
        read(cj, "band", c.c0.band, "c0");
        if (!c.c0.estimate && !(c.c0.value > 0.0)) {
            throw config_error("fixed c0 needs a positive value");
        }
    }
    if (j.contains("theorem2")) {
        reject_unknown(j.at("theorem2"), {"n_max"}, "theorem2");
        read(j.at("theorem2"), "n_max", c.theorem2_n_max, "theorem2");
    }
    if (j.contains("theorem3")) {
        reject_unknown(j.at("theorem3"), {"steps"}, "theorem3");
        read(j.at("theorem3"), "steps", c.theorem3_steps, "theorem3");
    }
    if (j.contains("theorem4")) {
        const auto& t4 = j.at("theorem4");
        reject_unknown(t4, {"window", "gamma"}, "theorem4");
        if (t4.contains("window")) {
            std::vector<double> w;
            read(t4, "window", w, "theorem4");
            if (w.size() != 2) {
                throw config_error("theorem4.window must have two entries");
            }
            c.theorem4_window_a = w[0];
            c.theorem4_window_b = w[1];
        }
        if (t4.contains("gamma")) {
            double g = 0.0;
            read(t4, "gamma", g, "theorem4");
            c.theorem4_gamma = g;
        }
    }
    if (j.contains("stokes")) {
        reject_unknown(j.at("stokes"), {"times", "tolerance"}, "stokes");
        read(j.at("stokes"), "times", c.stokes_times, "stokes");
        read(j.at("stokes"), "tolerance", c.stokes_tolerance, "stokes");
    }
    if (j.contains("fd")) {
        const auto& f = j.at("fd");
        reject_unknown(f, {"time", "steps", "order"}, "fd");
        double t = 0.0;
        read(f, "time", t, "fd");
        if (f.contains("time")) {
            c.fd_time = t;
        }
        read(f, "steps", c.fd_steps, "fd");
        read(f, "order", c.fd_order, "fd");
    }
    if (j.contains("audit")) {
        const auto& a = j.at("audit");
        reject_unknown(a, {"k_max", "alpha", "trials", "n_max"}, "audit");
        read(a, "k_max", c.audit_k_max, "audit");
        read(a, "alpha", c.audit_alphas, "audit");
        read(a, "trials", c.audit_trials, "audit");
        read(a, "n_max", c.audit_n_max, "audit");
    }

    if (c.stack_depth < 0 || c.stack_depth > default_stack_limit) {
        throw config_error("stack_depth must lie in [0, " + std::to_string(default_stack_limit) + "]");
    }
    if (c.truncation < 2) {
        throw config_error("truncation must be >= 2");
    }
    if (c.alphas.empty()) {
        throw config_error("alpha list must not be empty");
    }
    for (double a : c.alphas) {
        if (!(a > 0.0)) {
            throw config_error("alpha values must be positive");
        }
    }
    if (!(c.energy_tol > 0.0) || !(c.stokes_tolerance > 0.0)) {
        throw config_error("tolerances must be positive");
    }
    if (c.theorem2_n_max < 0 || c.theorem3_steps < 2) {
        throw config_error("theorem2.n_max must be >= 0 and theorem3.steps >= 2");
    }
    if (!(c.theorem4_window_a > 0.0) || !(c.theorem4_window_b > c.theorem4_window_a)) {
        throw config_error("theorem4.window must satisfy 0 < a < b");
    }
    if (c.c0.samples < 1 || c.c0.steps < 0) {
        throw config_error("c0.samples must be >= 1 and c0.steps >= 0");
    }
    // Snapshot times must be dt multiples; the solver validates the same rule.
    make_grid(c.solver.n);
    if (!(c.solver.dt > 0.0) || !(c.solver.t_end >= 0.0)) {
        throw config_error("dt must be positive and t_end nonnegative");
    }
    detail::steps_for(c.solver.t_end, c.solver.dt, "t_end");
    for (double t : c.solver.snapshot_times) {
        detail::steps_for(t, c.solver.dt, "snapshot time");
    }
    return c;
}

inline RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_run_config(j);
}

} // namespace gevrey_ns

#endif
