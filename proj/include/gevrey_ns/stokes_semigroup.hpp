#ifndef GEVREY_NS_STOKES_SEMIGROUP_HPP
#define GEVREY_NS_STOKES_SEMIGROUP_HPP

// Exact evolution of the Stokes system on the torus: the pressure vanishes
// identically and each mode decays like e^{-|xi|^2 t}.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "gevrey_ns/errors.hpp"
#include "gevrey_ns/special_functions.hpp"
#include "gevrey_ns/spectral_core.hpp"

namespace gevrey_ns {

/// Time t together with u_t^{(0..K)}(t).
struct DerivativeStack {
    double t = 0.0;
    std::vector<SpectralVelocity> entries;
    /// Index at which the recursion overflowed, or -1.
    int failure_index = -1;

    int depth() const noexcept { return static_cast<int>(entries.size()) - 1; }
    bool complete() const noexcept { return failure_index < 0; }
};

inline SpectralVelocity heat_evolve(const SpectralVelocity& u0, double t)
{
    if (!(t >= 0.0)) {
        throw config_error("heat_evolve needs t >= 0");
    }
    const Grid& g = u0.grid();
    return u0.map_modes([&g, t](std::size_t i, cplx a, cplx b) -> std::pair<cplx, cplx> {
        const double f = std::exp(-g.eigenvalue(i) * t);
        return {f * a, f * b};
    });
}

/// Entry k carries (-|xi|^2)^k e^{-|xi|^2 t} u0^(xi).
inline DerivativeStack stokes_derivative_stack(const SpectralVelocity& u0, double t, int K)
{
    if (!(t >= 0.0) || K < 0) {
        throw config_error("stokes_derivative_stack needs t >= 0 and K >= 0");
    }
    DerivativeStack s;
    s.t = t;
    s.entries.reserve(static_cast<std::size_t>(K) + 1);
    s.entries.push_back(heat_evolve(u0, t));
    for (int k = 1; k <= K; ++k) {
        s.entries.push_back(laplacian(s.entries.back()));
    }
    return s;
}

/// Energy spectrum grouped by Stokes eigenvalue: (lambda, (2pi)^2 sum |u^|^2).
struct ModeEnergy {
    double lambda = 0.0;
    double energy = 0.0;
};

inline std::vector<ModeEnergy> energy_by_eigenvalue(const SpectralVelocity& u0)
{
    const Grid& g = u0.grid();
    std::map<double, double> acc;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double e = std::norm(u0.component(0)[i]) + std::norm(u0.component(1)[i]);
        if (e > 0.0) {
            acc[g.eigenvalue(i)] += torus_area * e;
        }
    }
    std::vector<ModeEnergy> out;
    out.reserve(acc.size());
    for (const auto& [lambda, e] : acc) {
        out.push_back({lambda, e});
    }
    return out;
}

struct StokesIdentityResult {
    double t = 0.0;
    int truncation = 0;
    double energy = 0.0;        // ||u0||^2
    double state_term = 0.0;    // sum_{m<=M} L_m^2(t) / m!
    double integral_h = 0.0;    // int_0^t sum_{m<=M} H_m^2 / m!
    double integral_l = 0.0;    // int_0^t sum_{m<=M} L_m^2 / m!
    double total_h = 0.0;
    double total_l = 0.0;
    double residual_h = 0.0;    // total_h - ||u0||^2
    double residual_l = 0.0;
    double tail_bound = 0.0;    // analytic bound on the m > M remainder of total_h
};

namespace detail {

// Per unit energy of an eigenvalue lambda: state sum and the two integrals.
// With x = lambda t, L_m^2 / m! = x^m e^{-2x} / m! and
// int_0^t lambda (lambda s)^m e^{-2 lambda s} / m! ds = 2^{-(m+1)} P(m+1, 2x),
// P the regularized lower incomplete gamma function, advanced by the
// recurrence P(m+1, y) = P(m, y) - e^{-y} y^m / m!.
inline void stokes_mode_sums(double lambda, double t, int M, double& state, double& integral)
{
    const double x = lambda * t;
    const double y = 2.0 * x;
    state = 0.0;
    integral = 0.0;
    if (x == 0.0) {
        state = 1.0;
        return;
    }
    double p = -std::expm1(-y); // P(1, y)
    double half_pow = 0.5;
    for (int m = 0; m <= M; ++m) {
        state += std::exp(-y + m * std::log(x) - log_factorial(m));
        integral += half_pow * std::max(p, 0.0);
        p -= poisson_term(m + 1, y);
        half_pow *= 0.5;
    }
}

} // namespace detail

/// Truncated evaluation of the summed Stokes Gevrey balance. Both the
/// H-integrand form (which telescopes to ||u0||^2) and the L-integrand
/// form are returned with their residuals.
inline StokesIdentityResult stokes_gevrey_identity(const SpectralVelocity& u0, double t, int M = 40)
{
    if (!(t >= 0.0) || M < 2) {
        throw config_error("stokes_gevrey_identity needs t >= 0 and M >= 2");
    }
    StokesIdentityResult r;
    r.t = t;
    r.truncation = M;
    double lambda_max = 0.0;
    for (const ModeEnergy& me : energy_by_eigenvalue(u0)) {
        double state = 0.0;
        double integral = 0.0;
        detail::stokes_mode_sums(me.lambda, t, M, state, integral);
        r.energy += me.energy;
        r.state_term += me.energy * state;
        r.integral_h += me.energy * integral;
        r.integral_l += me.energy * integral / me.lambda;
        lambda_max = std::max(lambda_max, me.lambda);
    }
    r.total_h = r.state_term + r.integral_h;
    r.total_l = r.state_term + r.integral_l;
    r.residual_h = r.total_h - r.energy;
    r.residual_l = r.total_l - r.energy;
    // State remainder per unit energy is e^{-x} * Prob[Poisson(x) > M] with
    // x = lambda t, increasing in lambda; the integral remainder is at most
    // sum_{m>M} 2^{-(m+1)}.
    r.tail_bound = r.energy * (poisson_tail(M, lambda_max * t) + std::ldexp(1.0, -(M + 1)));
    return r;
}

/// Closed-form Gevrey functionals of the Stokes flow started from u0, in the
/// c-normalized form with c_k = (k!)^alpha.
class StokesSeries {
public:
    StokesSeries(const SpectralVelocity& u0, double alpha, int M = 60)
        : modes_(energy_by_eigenvalue(u0)), M_(M), energy_(0.0)
    {
        if (!(alpha > 0.0) || M < 1) {
            throw config_error("StokesSeries needs alpha > 0 and M >= 1");
        }
        for (const auto& me : modes_) {
            energy_ += me.energy;
        }
        log_r2_.resize(static_cast<std::size_t>(M) + 1);
        for (int m = 0; m <= M; ++m) {
            log_r2_[m] = log_normalization_sq(m, alpha);
        }
    }

    int truncation() const noexcept { return M_; }
    double energy() const noexcept { return energy_; }

    /// log of the squared factor mapping H_m-raw onto the c-normalized H_m.
    static double log_normalization_sq(int m, double alpha)
    {
        if (m % 2 == 0) {
            const int k = m / 2;
            return -2.0 * (k * std::numbers::ln2 + (1.0 + alpha) * log_factorial(k));
        }
        const int k = (m + 1) / 2;
        return std::numbers::ln2 - 2.0 * k * std::numbers::ln2 - log_factorial(k - 1) - log_factorial(k)
            - 2.0 * alpha * log_factorial(k);
    }

    /// sum_{m<=M} (H_m^ell)^2(t), normalized.
    double h_sum_sq(double t) const
    {
        double s = 0.0;
        for (const auto& me : modes_) {
            const double x = me.lambda * t;
            for (int m = 0; m <= M_; ++m) {
                const double lx = m == 0 ? 0.0 : m * std::log(x);
                s += me.energy * me.lambda * std::exp(log_r2_[m] + lx - 2.0 * x);
            }
        }
        return s;
    }

    /// int_0^t sum_{m<=M} (H_m^ell)^2, normalized, in closed form.
    double integrated_h_sum_sq(double t) const
    {
        if (t <= 0.0) {
            return 0.0;
        }
        double s = 0.0;
        for (const auto& me : modes_) {
            const double y = 2.0 * me.lambda * t;
            for (int m = 0; m <= M_; ++m) {
                const double p = boost::math::gamma_p(m + 1.0, y);
                s += me.energy
                    * std::exp(log_r2_[m] + log_factorial(m) - (m + 1) * std::numbers::ln2) * p;
            }
        }
        return s;
    }

    /// Same integral restricted to even indices m = 2k.
    double integrated_h_even_sum_sq(double t) const
    {
        if (t <= 0.0) {
            return 0.0;
        }
        double s = 0.0;
        for (const auto& me : modes_) {
            const double y = 2.0 * me.lambda * t;
            for (int m = 0; m <= M_; m += 2) {
                const double p = boost::math::gamma_p(m + 1.0, y);
                s += me.energy
                    * std::exp(log_r2_[m] + log_factorial(m) - (m + 1) * std::numbers::ln2) * p;
            }
        }
        return s;
    }

private:
    std::vector<ModeEnergy> modes_;
    int M_;
    double energy_;
    std::vector<double> log_r2_;
};

} // namespace gevrey_ns

#endif
