#ifndef GEVREY_NS_DERIVATIVE_ENGINE_HPP
#define GEVREY_NS_DERIVATIVE_ENGINE_HPP

// Time derivatives of a Navier-Stokes state computed from the state alone.
// Differentiating the Leray-projected equation k-1 times gives
//   u^(k) = Delta u^(k-1) - P sum_j C(k-1, j) div(u^(j) (x) u^(k-1-j)).

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "gevrey_ns/errors.hpp"
#include "gevrey_ns/ns_solver.hpp"
#include "gevrey_ns/special_functions.hpp"
#include "gevrey_ns/spectral_core.hpp"
#include "gevrey_ns/stokes_semigroup.hpp"

namespace gevrey_ns {

inline constexpr int default_stack_limit = 12;

struct StackOptions {
    bool include_nonlinear = true;
    int depth_limit = default_stack_limit;
    double overflow_threshold = 1e290;
    /// Modes of each nonlinear update below this fraction of the product
    /// scale are zeroed. 0 disables.
    double roundoff_floor = default_roundoff_floor;
};

namespace detail {

using tensor_samples = std::array<std::array<std::vector<double>, 2>, 2>;

// sum_j w_j a_j (x) b_{k-1-j} accumulated in physical space.
template <typename Weight>
tensor_samples pair_sum(const std::vector<PhysicalVelocity>& phys, int k, Weight&& weight)
{
    const std::size_t sz = phys.front().u[0].size();
    tensor_samples prod;
    for (auto& row : prod) {
        for (auto& v : row) {
            v.assign(sz, 0.0);
        }
    }
    for (int j = 0; j <= k - 1; ++j) {
        const double w = weight(j);
        const PhysicalVelocity& a = phys[static_cast<std::size_t>(j)];
        const PhysicalVelocity& b = phys[static_cast<std::size_t>(k - 1 - j)];
        for (int i = 0; i < 2; ++i) {
            for (int l = 0; l < 2; ++l) {
                auto& out = prod[i][l];
                const auto& x = a.u[i];
                const auto& y = b.u[l];
                for (std::size_t s = 0; s < sz; ++s) {
                    out[s] += w * x[s] * y[s];
                }
            }
        }
    }
    return prod;
}

inline SpectralVelocity stack_nonlinear(const Grid& g, const tensor_samples& prod, double floor)
{
    return floored_divergence(g, prod, true, floor);
}

inline bool overflowed(const SpectralVelocity& v, double threshold)
{
    return !v.all_finite() || v.max_abs() > threshold;
}

} // namespace detail

/// u_t^{(0..K)} at the state u (labelled with time t).
inline DerivativeStack time_derivative_stack(const SpectralVelocity& u, int K, double t = 0.0,
                                             const StackOptions& opt = {})
{
    if (K < 0) {
        throw config_error("stack depth must be nonnegative");
    }
    if (K > opt.depth_limit) {
        throw config_error("stack depth " + std::to_string(K) + " exceeds the double-precision limit "
                           + std::to_string(opt.depth_limit) + "; use scaled_derivative_stack");
    }
    DerivativeStack stack;
    stack.t = t;
    stack.entries.reserve(static_cast<std::size_t>(K) + 1);
    stack.entries.push_back(u);
    std::vector<PhysicalVelocity> phys;
    if (opt.include_nonlinear && K > 0) {
        phys.push_back(detail::band_physical(u));
    }
    for (int k = 1; k <= K; ++k) {
        SpectralVelocity next = laplacian(stack.entries.back());
        if (opt.include_nonlinear) {
            const auto prod = detail::pair_sum(phys, k, [k](int j) { return binomial(k - 1, j); });
            next += detail::stack_nonlinear(u.grid(), prod, opt.roundoff_floor);
        }
        if (detail::overflowed(next, opt.overflow_threshold)) {
            stack.failure_index = k;
            break;
        }
        stack.entries.push_back(std::move(next));
        if (opt.include_nonlinear && k < K) {
            phys.push_back(detail::band_physical(stack.entries.back()));
        }
    }
    return stack;
}

/// Rescaled stack w_k = t^k u^(k) / (2^k k!), built through
///   w_k = t / (2k) * (Delta w_{k-1} - P sum_j div(w_j (x) w_{k-1-j})),
/// which absorbs the binomial and factorial weights and never forms u^(k).
inline DerivativeStack scaled_derivative_stack(const SpectralVelocity& u, double t, int K,
                                               const StackOptions& opt = {})
{
    if (K < 0 || !(t >= 0.0)) {
        throw config_error("scaled stack needs K >= 0 and t >= 0");
    }
    DerivativeStack stack;
    stack.t = t;
    stack.entries.push_back(u);
    std::vector<PhysicalVelocity> phys;
    if (opt.include_nonlinear && K > 0) {
        phys.push_back(detail::band_physical(u));
    }
    for (int k = 1; k <= K; ++k) {
        SpectralVelocity next = laplacian(stack.entries.back());
        if (opt.include_nonlinear) {
            const auto prod = detail::pair_sum(phys, k, [](int) { return 1.0; });
            next += detail::stack_nonlinear(u.grid(), prod, opt.roundoff_floor);
        }
        next *= t / (2.0 * k);
        if (detail::overflowed(next, opt.overflow_threshold)) {
            stack.failure_index = k;
            break;
        }
        stack.entries.push_back(std::move(next));
        if (opt.include_nonlinear && k < K) {
            phys.push_back(detail::band_physical(stack.entries.back()));
        }
    }
    return stack;
}

struct FdConvergence {
    int order_k = 1;
    std::vector<double> steps;
    std::vector<double> errors;   // relative L2 error of the difference quotient
    std::vector<double> orders;   // between consecutive steps
    double observed_order = 0.0;  // minimum of `orders`
};

/// Compares entry k in {1, 2} of the recursion at time t with centered
/// second-order differences of the trajectory for each step in `h_list`.
inline FdConvergence fd_convergence_check(const Trajectory& traj, double t, int k, const std::vector<double>& h_list)
{
    if (k != 1 && k != 2) {
        throw config_error("finite-difference check supports k = 1 or 2");
    }
    if (h_list.size() < 2) {
        throw config_error("finite-difference check needs at least two step sizes");
    }
    const Snapshot* centre = traj.find(t);
    if (centre == nullptr) {
        throw config_error("no snapshot at the requested time");
    }
    const DerivativeStack stack = time_derivative_stack(centre->u, k, t);
    const SpectralVelocity& exact = stack.entries[static_cast<std::size_t>(k)];
    const double scale = norm_l2(exact);

    FdConvergence out;
    out.order_k = k;
    for (double h : h_list) {
        const Snapshot* plus = traj.find(t + h);
        const Snapshot* minus = traj.find(t - h);
        if (plus == nullptr || minus == nullptr) {
            throw config_error("insufficient snapshots around t for the requested step");
        }
        SpectralVelocity fd = (k == 1) ? (plus->u - minus->u) * (0.5 / h)
                                       : (plus->u - 2.0 * centre->u + minus->u) * (1.0 / (h * h));
        fd -= exact;
        out.steps.push_back(h);
        out.errors.push_back(scale > 0.0 ? norm_l2(fd) / scale : norm_l2(fd));
    }
    out.observed_order = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < out.errors.size(); ++i) {
        const double p = std::log(out.errors[i] / out.errors[i + 1]) / std::log(out.steps[i] / out.steps[i + 1]);
        out.orders.push_back(p);
        out.observed_order = std::min(out.observed_order, p);
    }
    return out;
}

} // namespace gevrey_ns

#endif
