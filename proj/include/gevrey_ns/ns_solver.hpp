#ifndef GEVREY_NS_NS_SOLVER_HPP
#define GEVREY_NS_NS_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "gevrey_ns/errors.hpp"
#include "gevrey_ns/spectral_core.hpp"
#include "gevrey_ns/stokes_semigroup.hpp"

namespace gevrey_ns {

/// Snapshot stride that applies until time `until`.
struct ScheduleSegment {
    double until = 0.0;
    long stride = 1;
};

struct SolverConfig {
    int n = 32;
    double dt = 1e-3;
    double t_end = 1.0;
    InitialDataSpec initial = TaylorGreen{};
    /// Explicit snapshot times; when empty, `schedule` is used, and when
    /// both are empty every step is a snapshot.
    std::vector<double> snapshot_times;
    std::vector<ScheduleSegment> schedule;
    bool stability_guard = true;
    double cfl = 0.5;
};

struct Snapshot {
    double t = 0.0;
    long step = 0;
    SpectralVelocity u;
    double dissipation = 0.0; // int_0^t ||grad u||^2, see detail::step_dissipation
};

struct TrajectoryRow {
    double t = 0.0;
    double l2 = 0.0;
    double grad_l2 = 0.0;
    double dissipation = 0.0;
};

struct Trajectory {
    SolverConfig config;
    std::vector<Snapshot> snapshots;
    std::vector<TrajectoryRow> rows;
    /// max over every step of |1/2 ||u||^2 + D - 1/2 ||u0||^2|.
    double max_step_residual = 0.0;

    const Snapshot* find(double t, double tol = 1e-9) const
    {
        for (const auto& s : snapshots) {
            if (std::abs(s.t - t) <= tol * std::max(1.0, std::abs(t))) {
                return &s;
            }
        }
        return nullptr;
    }
};

/// Advective limit cfl / (K max|u|) with K the dealiasing cutoff.
inline double stable_step_limit(const SpectralVelocity& u, double cfl = 0.5)
{
    const double umax = max_abs_velocity(u);
    if (umax == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return cfl / (u.grid().dealias_cutoff() * umax);
}

namespace detail {

inline std::vector<double> heat_multipliers(const Grid& g, double t)
{
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        f[i] = std::exp(-g.eigenvalue(i) * t);
    }
    return f;
}

inline SpectralVelocity apply(const std::vector<double>& f, const SpectralVelocity& v)
{
    return v.map_modes([&f](std::size_t i, cplx a, cplx b) -> std::pair<cplx, cplx> {
        return {f[i] * a, f[i] * b};
    });
}

} // namespace detail

/// One integrating-factor (Lawson) RK4 step: the viscous part is carried by
/// the exact multipliers e^{-|xi|^2 h}.
inline SpectralVelocity step(const SpectralVelocity& u, double dt)
{
    if (!(dt > 0.0)) {
        throw config_error("time step must be positive");
    }
    const std::vector<double> eh = detail::heat_multipliers(u.grid(), 0.5 * dt);
    const std::vector<double> ef = detail::heat_multipliers(u.grid(), dt);
    const auto N = [](const SpectralVelocity& v) { return nonlinear_term(v, v, default_roundoff_floor); };
    const auto E = [](const std::vector<double>& f, const SpectralVelocity& v) { return detail::apply(f, v); };

    const SpectralVelocity k1 = N(u);
    const SpectralVelocity eu_half = E(eh, u);
    const SpectralVelocity k2 = N(SpectralVelocity(eu_half).add_scaled(0.5 * dt, E(eh, k1)));
    const SpectralVelocity k3 = N(SpectralVelocity(eu_half).add_scaled(0.5 * dt, k2));
    const SpectralVelocity k4 = N(E(ef, u).add_scaled(dt, E(eh, k3)));

    SpectralVelocity out = E(ef, u);
    out.add_scaled(dt / 6.0, E(ef, k1));
    out.add_scaled(dt / 3.0, E(eh, k2 + k3));
    out.add_scaled(dt / 6.0, k4);
    if (!out.all_finite()) {
        throw integration_error("non-finite state after step", 0.0, dt);
    }
    return out;
}

namespace detail {

// int ||grad u||^2 over one step of length h, mode by mode, with |u^(xi)|^2
// interpolated exponentially between the step endpoints (logarithmic mean
// in place of the arithmetic one). Second order like the trapezoid rule and
// exact whenever each mode decays exponentially, as for the Stokes-exact
// flows.
inline double step_dissipation(const SpectralVelocity& a, const SpectralVelocity& b, double h)
{
    const Grid& g = a.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double lambda = g.eigenvalue(i);
        if (lambda == 0.0) {
            continue;
        }
        const double p = std::norm(a.component(0)[i]) + std::norm(a.component(1)[i]);
        const double q = std::norm(b.component(0)[i]) + std::norm(b.component(1)[i]);
        double mean = 0.5 * (p + q);
        if (p > 0.0 && q > 0.0) {
            const double d = std::log(p / q);
            if (std::abs(d) > 1e-8) {
                mean = p * -std::expm1(-d) / d;
            }
        }
        s += lambda * mean;
    }
    return torus_area * h * s;
}

inline long steps_for(double t, double dt, const char* what)
{
    const double q = t / dt;
    const double r = std::nearbyint(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, q)) {
        throw config_error(std::string(what) + " is not an integer multiple of dt");
    }
    return static_cast<long>(r);
}

inline std::set<long> snapshot_steps(const SolverConfig& c, long total)
{
    std::set<long> steps{0};
    if (!c.snapshot_times.empty()) {
        for (double t : c.snapshot_times) {
            if (t < 0.0 || t > c.t_end * (1.0 + 1e-12)) {
                throw config_error("snapshot time outside [0, t_end]");
            }
            steps.insert(steps_for(t, c.dt, "snapshot time"));
        }
        return steps;
    }
    if (c.schedule.empty()) {
        for (long s = 1; s <= total; ++s) {
            steps.insert(s);
        }
        return steps;
    }
    long s = 0;
    for (const auto& seg : c.schedule) {
        if (seg.stride < 1) {
            throw config_error("schedule stride must be >= 1");
        }
        const long until = std::min(total, static_cast<long>(std::floor(seg.until / c.dt + 1e-9)));
        while (s + seg.stride <= until) {
            s += seg.stride;
            steps.insert(s);
        }
    }
    steps.insert(total);
    return steps;
}

} // namespace detail

using SnapshotObserver = std::function<void(const Snapshot&)>;

/// Integrates from the configured initial data, calling `observer` on every
/// snapshot (including t = 0). When `keep` is true the snapshots are also
/// stored in the returned trajectory.
inline Trajectory run(const SolverConfig& config, const SnapshotObserver& observer = {}, bool keep = true)
{
    if (!(config.dt > 0.0) || !(config.t_end >= 0.0)) {
        throw config_error("dt must be positive and t_end nonnegative");
    }
    const Grid grid = make_grid(config.n);
    const long total = detail::steps_for(config.t_end, config.dt, "t_end");
    const std::set<long> wanted = detail::snapshot_steps(config, total);

    Trajectory traj;
    traj.config = config;
    SpectralVelocity u = make_initial_data(config.initial, grid);

    const double half_e0 = 0.5 * std::pow(norm_l2(u), 2);
    double grad_sq = std::pow(norm_grad_l2(u), 2);
    double dissipation = 0.0;

    const auto emit = [&](long s) {
        const double t = s * config.dt;
        Snapshot snap{t, s, u, dissipation};
        traj.rows.push_back({t, norm_l2(u), std::sqrt(grad_sq), dissipation});
        if (observer) {
            observer(snap);
        }
        if (keep) {
            traj.snapshots.push_back(std::move(snap));
        }
    };
    const auto guard = [&](long s) {
        if (config.stability_guard && config.dt > stable_step_limit(u, config.cfl)) {
            throw integration_error("dt exceeds the advective stability limit", s * config.dt, config.dt);
        }
    };

    guard(0);
    emit(0);
    for (long s = 1; s <= total; ++s) {
        SpectralVelocity next(grid);
        try {
            next = step(u, config.dt);
        } catch (const integration_error&) {
            throw integration_error("non-finite state after step", s * config.dt, config.dt);
        }
        dissipation += detail::step_dissipation(u, next, config.dt);
        u = std::move(next);
        grad_sq = std::pow(norm_grad_l2(u), 2);
        const double residual = 0.5 * std::pow(norm_l2(u), 2) + dissipation - half_e0;
        if (!std::isfinite(residual)) {
            throw integration_error("energy ledger became non-finite", s * config.dt, config.dt);
        }
        traj.max_step_residual = std::max(traj.max_step_residual, std::abs(residual));
        if (wanted.count(s) != 0) {
            guard(s);
            emit(s);
        }
    }
    return traj;
}

struct EnergyLedger {
    std::vector<double> times;
    std::vector<double> residuals; // 1/2 ||u(t)||^2 + D(t) - 1/2 ||u0||^2
    double max_abs = 0.0;
};

inline EnergyLedger energy_ledger(const Trajectory& traj)
{
    if (traj.rows.empty()) {
        throw config_error("energy ledger of an empty trajectory");
    }
    EnergyLedger led;
    const double half_e0 = 0.5 * traj.rows.front().l2 * traj.rows.front().l2;
    for (const auto& row : traj.rows) {
        const double r = 0.5 * row.l2 * row.l2 + row.dissipation - half_e0;
        led.times.push_back(row.t);
        led.residuals.push_back(r);
        led.max_abs = std::max(led.max_abs, std::abs(r));
    }
    return led;
}

} // namespace gevrey_ns

#endif
