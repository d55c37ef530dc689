#ifndef GEVREY_NS_LADYZHENSKAYA_HPP
#define GEVREY_NS_LADYZHENSKAYA_HPP

// Empirical estimate of the best constant in ||z||_4^2 <= C0 ||z|| ||grad z||
// for mean-zero divergence-free fields on the torus.

#include <cmath>
#include <cstdint>
#include <vector>

#include "gevrey_ns/detail/fft.hpp"
#include "gevrey_ns/errors.hpp"
#include "gevrey_ns/spectral_core.hpp"

namespace gevrey_ns {

inline double ladyzhenskaya_ratio(const SpectralVelocity& z)
{
    const double a = norm_l2(z);
    const double b = norm_grad_l2(z);
    if (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    const double q = norm_l4(z);
    return q * q / (a * b);
}

namespace detail {

inline SpectralVelocity box_mask(const SpectralVelocity& v, int band)
{
    const Grid& g = v.grid();
    return v.map_modes([&g, band](std::size_t i, cplx a, cplx b) -> std::pair<cplx, cplx> {
        if (std::abs(g.kx(i)) > band || std::abs(g.ky(i)) > band) {
            return {0.0, 0.0};
        }
        return {a, b};
    });
}

// Gradient of log R = 2 log ||z||_4 - log ||z|| - log ||grad z|| (up to the
// constant metric factor), projected and restricted to the band. The cubic
// term is computed on the 2x grid, where it is alias-free, and folded back.
inline SpectralVelocity log_ratio_gradient(const SpectralVelocity& z, int band)
{
    const Grid& g = z.grid();
    const int m = 2 * g.n();
    const PhysicalVelocity p = to_physical(z, m);
    const std::size_t sz = p.u[0].size();
    std::vector<cplx> c0(sz);
    std::vector<cplx> c1(sz);
    double q = 0.0;
    for (std::size_t i = 0; i < sz; ++i) {
        const double r = p.u[0][i] * p.u[0][i] + p.u[1][i] * p.u[1][i];
        q += r * r;
        c0[i] = r * p.u[0][i];
        c1[i] = r * p.u[1][i];
    }
    const double cells = static_cast<double>(m) * m;
    q *= torus_area / cells;
    const fft_plan_2d& plan = plan_for(m);
    plan.forward(c0);
    plan.forward(c1);
    SpectralVelocity::coefficients g0(g.size());
    SpectralVelocity::coefficients g1(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.active(i)) {
            continue;
        }
        const int a = g.kx(i) >= 0 ? g.kx(i) : g.kx(i) + m;
        const int b = g.ky(i) >= 0 ? g.ky(i) : g.ky(i) + m;
        const std::size_t j = static_cast<std::size_t>(a) * m + b;
        g0[i] = c0[j] / cells;
        g1[i] = c1[j] / cells;
    }
    const double e = std::pow(norm_l2(z), 2);
    const double d = std::pow(norm_grad_l2(z), 2);
    SpectralVelocity out = SpectralVelocity(g, std::move(g0), std::move(g1)) * (2.0 / q);
    out.add_scaled(-1.0 / e, z);
    out.add_scaled(1.0 / d, laplacian(z));
    return box_mask(leray_project(out), band);
}

} // namespace detail

struct AscentResult {
    SpectralVelocity field;
    double ratio = 0.0;
    int accepted = 0;
};

/// Normalized gradient ascent with a backtracking step; z is kept at unit L2.
/// band <= 0 selects the full resolved band.
inline AscentResult ascend_ladyzhenskaya(SpectralVelocity z, int steps, int band)
{
    if (band <= 0) {
        band = z.grid().max_wavenumber();
    }
    z = detail::box_mask(z, band);
    const double n0 = norm_l2(z);
    if (n0 == 0.0) {
        throw config_error("ascent needs a nonzero starting field");
    }
    z *= 1.0 / n0;
    AscentResult res{z, ladyzhenskaya_ratio(z), 0};
    double eta = 0.1;
    for (int it = 0; it < steps; ++it) {
        const SpectralVelocity grad = detail::log_ratio_gradient(res.field, band);
        const double gn = norm_l2(grad);
        if (!(gn > 0.0)) {
            break;
        }
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
            SpectralVelocity trial = res.field;
            trial.add_scaled(eta / gn, grad);
            trial *= 1.0 / norm_l2(trial);
            const double r = ladyzhenskaya_ratio(trial);
            if (r > res.ratio) {
                res.field = std::move(trial);
                res.ratio = r;
                ++res.accepted;
                eta *= 1.3;
                moved = true;
                break;
            }
            eta *= 0.5;
        }
        if (!moved) {
            break;
        }
    }
    return res;
}

struct C0Estimate {
    double value = 0.0;
    int grid = 0;
    int band = 0;
    std::uint64_t seed = 0;
    std::vector<double> sample_ratios;
    /// Energy fraction of the maximizer in integer shells |xi| in [s, s+1).
    std::vector<double> signature;
};

/// Maximum over `n_samples` seeded random fields of the ascended ratio.
/// Sample s depends only on seed + s, so the estimate is a running maximum
/// in n_samples. band <= 0 selects the full resolved band.
inline C0Estimate estimate_c0(int n, int n_samples, int ascent_steps, std::uint64_t seed, int band = 0)
{
    if (n_samples < 1 || ascent_steps < 0) {
        throw config_error("estimate_c0 needs n_samples >= 1 and ascent_steps >= 0");
    }
    const Grid g = make_grid(n);
    C0Estimate est;
    est.grid = n;
    est.band = band > 0 ? std::min(band, g.max_wavenumber()) : g.max_wavenumber();
    est.seed = seed;
    SpectralVelocity best(g);
    for (int s = 0; s < n_samples; ++s) {
        const SpectralVelocity z0 = make_initial_data(RandomSpectrum{1.0, 4, seed + static_cast<std::uint64_t>(s), 1.0}, g);
        AscentResult r = ascend_ladyzhenskaya(z0, ascent_steps, est.band);
        est.sample_ratios.push_back(r.ratio);
        if (r.ratio > est.value) {
            est.value = r.ratio;
            best = std::move(r.field);
        }
    }
    const int shells = static_cast<int>(std::ceil(std::sqrt(2.0) * g.max_wavenumber())) + 1;
    est.signature.assign(static_cast<std::size_t>(shells), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double e = std::norm(best.component(0)[i]) + std::norm(best.component(1)[i]);
        const auto s = static_cast<std::size_t>(std::sqrt(g.eigenvalue(i)));
        if (s < est.signature.size()) {
            est.signature[s] += e;
        }
        total += e;
    }
    if (total > 0.0) {
        for (double& v : est.signature) {
            v /= total;
        }
    }
    return est;
}

} // namespace gevrey_ns

#endif
