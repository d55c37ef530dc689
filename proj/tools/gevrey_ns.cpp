// Command-line front end for the Navier-Stokes Gevrey verifier.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gevrey_ns/gevrey_ns.hpp"

namespace fs = std::filesystem;
using namespace gevrey_ns;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<double> alphas;
    bool json = false;
};

struct Outcome {
    ojson report = ojson::object();
    int exit_code = 0;
};

int combine(int a, int b)
{
    if (a == 1 || b == 1) {
        return 1;
    }
    return std::max(a, b);
}

int exit_for(Verdict v)
{
    switch (v) {
    case Verdict::pass:
        return 0;
    case Verdict::fail:
        return 1;
    default:
        return 2;
    }
}

RunConfig load(const Options& opt, const std::string& command)
{
    nlohmann::json j = nlohmann::json::object();
    if (!opt.config.empty()) {
        std::ifstream in(opt.config);
        if (!in) {
            throw config_error("cannot open config file " + opt.config);
        }
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw config_error("config " + opt.config + " is not valid JSON: " + e.what());
        }
    }
    if (opt.seed) {
        j["seed"] = *opt.seed;
    }
    if (!opt.alphas.empty()) {
        if (command == "audit-lemmas") {
            j["audit"]["alpha"] = opt.alphas;
        } else {
            j["alpha"] = opt.alphas;
        }
    }
    if (!opt.out.empty()) {
        j["output_dir"] = opt.out;
    }
    return parse_run_config(j);
}

double c0_if_needed(const RunConfig& cfg, ojson& report)
{
    if (!cfg.initial.smallness) {
        return 0.0;
    }
    const C0Resolution c0 = resolve_c0(cfg);
    report["c0"] = to_json(c0);
    return c0.value;
}

Outcome stokes_verify(const RunConfig& cfg)
{
    Outcome o;
    const double c0 = c0_if_needed(cfg, o.report);
    const Grid g = make_grid(cfg.solver.n);
    const SpectralVelocity u0 = make_initial_data(resolve_initial(cfg.initial, g, c0, cfg.alphas.front()), g);
    ojson rows = ojson::array();
    bool ok = true;
    for (double t : cfg.stokes_times) {
        const StokesCheck c = stokes_check(u0, t, cfg.truncation, cfg.stokes_tolerance);
        ok = ok && c.ok;
        rows.push_back(to_json(c));
        std::cout << "t=" << t << " total=" << c.closed.total_h << " residual=" << c.closed.residual_h
                  << " tail=" << c.closed.tail_bound << (c.ok ? " ok" : " FAIL") << '\n';
    }
    o.report["rows"] = rows;
    o.report["verdict"] = ok ? "pass" : "fail";
    o.exit_code = ok ? 0 : 1;
    return o;
}

Outcome estimate(const RunConfig& cfg)
{
    Outcome o;
    const C0Resolution c0 = resolve_c0(cfg);
    o.report["c0"] = to_json(c0);
    const Grid g = make_grid(cfg.c0.grid);
    const double shear = ladyzhenskaya_ratio(make_initial_data(Shear{1.0}, g));
    o.report["shear_ratio"] = shear;
    const bool ok = c0.value >= shear;
    o.report["verdict"] = ok ? "pass" : "fail";
    o.exit_code = ok ? 0 : 1;
    std::cout << "C0 estimate " << c0.value << " (shear ratio " << shear << ")\n";
    return o;
}

Outcome ns_run(const RunConfig& cfg, const fs::path& out)
{
    Outcome o;
    const double c0 = c0_if_needed(cfg, o.report);
    const SolverConfig sc = solver_config(cfg, c0, cfg.alphas.front());
    const Trajectory traj = run(sc);
    write_trajectory_csv((out / "trajectory.csv").string(), traj.rows);
    const EnergyLedger led = energy_ledger(traj);
    const double tol = cfg.energy_tol * std::max(1.0, std::pow(sc.dt / 1e-3, 2));
    double divergence = 0.0;
    double mean = 0.0;
    for (const auto& s : traj.snapshots) {
        const FieldDiagnostics d = check_invariants(s.u);
        divergence = std::max(divergence, d.divergence);
        mean = std::max(mean, d.mean);
    }
    bool ok = led.max_abs <= tol && divergence <= 1e-12 && mean <= 1e-12;
    o.report["energy_ledger"] = {{"max_residual", led.max_abs},
                                 {"step_max_residual", traj.max_step_residual},
                                 {"tolerance", tol}};
    o.report["invariants"] = {{"max_divergence", divergence}, {"max_mean", mean}};
    o.report["final"] = {{"t", traj.rows.back().t}, {"l2_norm", traj.rows.back().l2}};
    std::cout << "energy ledger max residual " << led.max_abs << " (tolerance " << tol << ")\n";
    if (cfg.fd_time) {
        SolverConfig fc = sc;
        fc.schedule.clear();
        fc.snapshot_times = {*cfg.fd_time};
        for (double h : cfg.fd_steps) {
            fc.snapshot_times.push_back(*cfg.fd_time - h);
            fc.snapshot_times.push_back(*cfg.fd_time + h);
        }
        fc.t_end = std::max(fc.t_end, *cfg.fd_time + *std::max_element(cfg.fd_steps.begin(), cfg.fd_steps.end()));
        const FdConvergence fd = fd_convergence_check(run(fc), *cfg.fd_time, cfg.fd_order, cfg.fd_steps);
        o.report["finite_difference"] = {{"k", fd.order_k},
                                         {"steps", fd.steps},
                                         {"errors", fd.errors},
                                         {"orders", fd.orders},
                                         {"observed_order", fd.observed_order}};
        ok = ok && fd.observed_order >= 1.9;
        std::cout << "finite-difference observed order " << fd.observed_order << '\n';
    }
    o.report["verdict"] = ok ? "pass" : "fail";
    o.exit_code = ok ? 0 : 1;
    return o;
}

Outcome check(int theorem, const RunConfig& cfg, const fs::path& out)
{
    Outcome o;
    const C0Resolution c0 = resolve_c0(cfg);
    o.report["c0"] = to_json(c0);
    ojson reports = ojson::array();
    int code = 0;
    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
        const double alpha = cfg.alphas[ai];
        std::vector<FunctionalSample> samples;
        std::vector<TrajectoryRow> rows;
        CheckContext ctx{cfg, c0.value, &samples, &rows};
        std::vector<TheoremReport> reps;
        switch (theorem) {
        case 1:
            reps.push_back(check_theorem1(ctx, alpha));
            break;
        case 2:
            reps = check_theorem2(ctx, alpha);
            break;
        case 3:
            reps.push_back(check_theorem3(ctx, alpha));
            break;
        default:
            reps.push_back(check_theorem4(ctx, alpha));
            break;
        }
        const std::string suffix = ai == 0 ? "" : "_" + std::to_string(ai);
        if (!samples.empty()) {
            write_functionals_csv((out / ("functionals" + suffix + ".csv")).string(), samples);
        }
        if (!rows.empty()) {
            write_trajectory_csv((out / ("trajectory" + suffix + ".csv")).string(), rows);
        }
        for (const auto& r : reps) {
            code = combine(code, exit_for(r.verdict));
            std::cout << "theorem " << theorem << " alpha=" << alpha;
            if (r.params.contains("n")) {
                std::cout << " n=" << r.params["n"];
            }
            std::cout << ": " << to_string(r.verdict);
            if (!r.rows.empty()) {
                std::cout << " min_margin=" << r.min_margin();
            }
            if (!r.message.empty()) {
                std::cout << " (" << r.message << ")";
            }
            std::cout << '\n';
            reports.push_back(to_json(r));
        }
    }
    o.report["reports"] = reports;
    o.report["verdict"] = code == 0 ? "pass" : (code == 1 ? "fail" : "error");
    o.exit_code = code;
    return o;
}

Outcome audit(const RunConfig& cfg, const fs::path& out)
{
    Outcome o;
    const CccAudit a = lemma_audit_ccc0(cfg.audit_k_max, cfg.audit_alphas);
    write_ccc0_csv((out / "audit_ccc0.csv").string(), a);
    const ConvolutionAudit conv = lemma_audit_convolution(cfg.audit_trials, cfg.audit_n_max, cfg.seed);
    ojson printed = ojson::array();
    for (const auto& r : a.printed_violations) {
        printed.push_back({{"k", r.k}, {"j", r.j}, {"alpha", r.alpha}, {"ratio", r.ratio}, {"printed_bound", r.printed_bound}});
    }
    o.report["ccc0"] = {{"k_max", cfg.audit_k_max},
                        {"alpha", cfg.audit_alphas},
                        {"rows", a.rows.size()},
                        {"printed_bound_violations", a.printed_violations.size()},
                        {"corrected_bound_violations", a.corrected_violations.size()},
                        {"printed_violation_table", printed}};
    o.report["convolution"] = {{"trials", conv.trials}, {"n_max", cfg.audit_n_max}, {"worst_ratio", conv.worst_ratio},
                               {"worst_trial", conv.worst_trial}};
    const bool ok = a.corrected_violations.empty() && conv.worst_ratio <= 1.0 + 1e-12;
    o.report["verdict"] = ok ? "pass" : "fail";
    o.exit_code = ok ? 0 : 1;
    std::cout << "printed-bound findings: " << a.printed_violations.size()
              << ", corrected-bound violations: " << a.corrected_violations.size()
              << ", convolution worst ratio: " << conv.worst_ratio << '\n';
    return o;
}

Outcome decay(const RunConfig& cfg, const fs::path& out)
{
    Outcome o;
    const double c0 = c0_if_needed(cfg, o.report);
    const Trajectory traj = run(solver_config(cfg, c0, cfg.alphas.front()));
    write_trajectory_csv((out / "trajectory.csv").string(), traj.rows);
    std::vector<double> t;
    std::vector<double> n;
    for (const auto& r : traj.rows) {
        t.push_back(r.t);
        n.push_back(r.l2);
    }
    const DecayFit fit = fit_decay(t, n, cfg.theorem4_window_a, cfg.theorem4_window_b);
    o.report["fit"] = {{"K_fit", fit.K_fit},       {"gamma_fit", fit.gamma_fit},
                       {"window", {fit.t_a, fit.t_b}}, {"residual", fit.residual},
                       {"points", fit.points},     {"truncated", fit.truncated},
                       {"super_algebraic", fit.super_algebraic}};
    o.report["verdict"] = fit.gamma_positive ? "pass" : "n/a";
    o.exit_code = fit.gamma_positive ? 0 : 2;
    std::cout << "K_fit=" << fit.K_fit << " gamma_fit=" << fit.gamma_fit << '\n';
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gevrey-in-time verification of 2D periodic Navier-Stokes flows"};
    app.require_subcommand(1);
    Options opt;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"stokes-verify", "Stokes Gevrey identity, closed form against series"},
        {"estimate-c0", "Ladyzhenskaya constant by seeded gradient ascent"},
        {"ns-run", "integrate and write trajectory.csv"},
        {"check-thm1", "small-data Gevrey bound"},
        {"check-thm2", "large-data bound for each n <= n_max"},
        {"check-thm3", "fluctuation bound near t = 0"},
        {"check-thm4", "weighted bound after the fitted decay time"},
        {"audit-lemmas", "convolution and coefficient audits"},
        {"fit-decay", "power-law fit of the L2 norm"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "JSON run configuration");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "master seed");
        sub->add_option("--alpha", opt.alphas, "Gevrey exponent (repeatable)")->take_all()->allow_extra_args(true);
        sub->add_flag("--json", opt.json, "print the report JSON on stdout");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const RunConfig cfg = load(opt, command);
        const fs::path out(cfg.output_dir);
        fs::create_directories(out);
        Outcome o;
        if (command == "stokes-verify") {
            o = stokes_verify(cfg);
        } else if (command == "estimate-c0") {
            o = estimate(cfg);
        } else if (command == "ns-run") {
            o = ns_run(cfg, out);
        } else if (command == "audit-lemmas") {
            o = audit(cfg, out);
        } else if (command == "fit-decay") {
            o = decay(cfg, out);
        } else {
            o = check(command.back() - '0', cfg, out);
        }
        ojson report;
        report["command"] = command;
        report["seed"] = cfg.seed;
        for (auto& [key, value] : o.report.items()) {
            report[key] = value;
        }
        std::ofstream(out / "report.json") << report.dump(2) << '\n';
        if (opt.json) {
            std::cout << report.dump(2) << '\n';
        }
        return o.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
