#ifndef GEVREY_NS_SPECTRAL_CORE_HPP
#define GEVREY_NS_SPECTRAL_CORE_HPP

// Fourier representation of real, mean-zero, divergence-free vector fields on
// the 2pi-periodic torus. Coefficients follow u(x) = sum_xi u^(xi) e^{i xi.x},
// stored row-major with the first index carrying the x-wavenumber.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "gevrey_ns/detail/fft.hpp"
#include "gevrey_ns/errors.hpp"

namespace gevrey_ns {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double torus_area = two_pi * two_pi;

class Grid {
public:
    explicit Grid(int n) : tables_(build(n)) {}

    int n() const noexcept { return tables_->n; }
    std::size_t size() const noexcept { return tables_->kx.size(); }

    int wavenumber(int index) const noexcept { return index <= n() / 2 ? index : index - n(); }
    int index_of(int k) const noexcept { return k >= 0 ? k : k + n(); }
    std::size_t flat(int kx, int ky) const noexcept
    {
        return static_cast<std::size_t>(index_of(kx)) * n() + index_of(ky);
    }

    int kx(std::size_t i) const noexcept { return tables_->kx[i]; }
    int ky(std::size_t i) const noexcept { return tables_->ky[i]; }
    /// |xi|^2, the Stokes eigenvalue of mode i.
    double eigenvalue(std::size_t i) const noexcept { return tables_->k2[i]; }
    /// False on the unpaired Nyquist row and column.
    bool active(std::size_t i) const noexcept { return tables_->active[i] != 0; }

    /// Largest K with 3K < n: quadratic products of modes |xi|_inf <= K alias
    /// only onto modes outside that band.
    int dealias_cutoff() const noexcept { return (n() - 1) / 3; }
    bool in_band(std::size_t i) const noexcept
    {
        const int k = dealias_cutoff();
        return std::abs(kx(i)) <= k && std::abs(ky(i)) <= k;
    }
    int max_wavenumber() const noexcept { return n() / 2 - 1; }

    friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.n() == b.n(); }

private:
    struct tables {
        int n = 0;
        std::vector<int> kx;
        std::vector<int> ky;
        std::vector<double> k2;
        std::vector<std::uint8_t> active;
    };

    static std::shared_ptr<const tables> build(int n)
    {
        if (n < 8 || n % 2 != 0) {
            throw config_error("grid size must be an even integer >= 8, got " + std::to_string(n));
        }
        auto t = std::make_shared<tables>();
        t->n = n;
        const std::size_t total = static_cast<std::size_t>(n) * n;
        t->kx.resize(total);
        t->ky.resize(total);
        t->k2.resize(total);
        t->active.resize(total);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const std::size_t i = static_cast<std::size_t>(a) * n + b;
                const int kx = a <= n / 2 ? a : a - n;
                const int ky = b <= n / 2 ? b : b - n;
                t->kx[i] = kx;
                t->ky[i] = ky;
                t->k2[i] = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
                t->active[i] = (a != n / 2 && b != n / 2) ? 1 : 0;
            }
        }
        return t;
    }

    std::shared_ptr<const tables> tables_;
};

inline Grid make_grid(int n) { return Grid(n); }

/// Two-component field in Fourier space. Leray projection and the
/// nonlinear term accept arbitrary coefficients; check_invariants reports
/// how far a value is from a physical (real, mean-zero, solenoidal) field.
class SpectralVelocity {
public:
    using coefficients = std::vector<cplx>;

    explicit SpectralVelocity(Grid grid)
        : grid_(std::move(grid)), u_{coefficients(grid_.size()), coefficients(grid_.size())}
    {
    }

    SpectralVelocity(Grid grid, coefficients u1, coefficients u2)
        : grid_(std::move(grid)), u_{std::move(u1), std::move(u2)}
    {
        if (u_[0].size() != grid_.size() || u_[1].size() != grid_.size()) {
            throw config_error("coefficient arrays do not match the grid");
        }
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            if (!grid_.active(i)) {
                u_[0][i] = 0.0;
                u_[1][i] = 0.0;
            }
        }
    }

    const Grid& grid() const noexcept { return grid_; }
    const coefficients& component(int c) const { return u_[static_cast<std::size_t>(c)]; }
    cplx at(int c, int kx, int ky) const { return u_[static_cast<std::size_t>(c)][grid_.flat(kx, ky)]; }

    SpectralVelocity& operator+=(const SpectralVelocity& o)
    {
        require_same_grid(o);
        for (int c = 0; c < 2; ++c) {
            std::transform(u_[c].begin(), u_[c].end(), o.u_[c].begin(), u_[c].begin(), std::plus<>{});
        }
        return *this;
    }
    SpectralVelocity& operator-=(const SpectralVelocity& o)
    {
        require_same_grid(o);
        for (int c = 0; c < 2; ++c) {
            std::transform(u_[c].begin(), u_[c].end(), o.u_[c].begin(), u_[c].begin(), std::minus<>{});
        }
        return *this;
    }
    SpectralVelocity& operator*=(double s)
    {
        for (auto& comp : u_) {
            for (auto& z : comp) {
                z *= s;
            }
        }
        return *this;
    }
    /// this += s * o
    SpectralVelocity& add_scaled(double s, const SpectralVelocity& o)
    {
        require_same_grid(o);
        for (int c = 0; c < 2; ++c) {
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                u_[c][i] += s * o.u_[c][i];
            }
        }
        return *this;
    }

    friend SpectralVelocity operator+(SpectralVelocity a, const SpectralVelocity& b) { return a += b; }
    friend SpectralVelocity operator-(SpectralVelocity a, const SpectralVelocity& b) { return a -= b; }
    friend SpectralVelocity operator*(double s, SpectralVelocity a) { return a *= s; }
    friend SpectralVelocity operator*(SpectralVelocity a, double s) { return a *= s; }

    /// Modewise map on the pair (u1, u2): f(index, u1, u2) -> pair.
    template <typename F>
    SpectralVelocity map_modes(F&& f) const
    {
        SpectralVelocity out(grid_);
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            if (!grid_.active(i)) {
                continue;
            }
            const auto [a, b] = f(i, u_[0][i], u_[1][i]);
            out.u_[0][i] = a;
            out.u_[1][i] = b;
        }
        return out;
    }

    /// Largest coefficient modulus over both components.
    double max_abs() const
    {
        double m = 0.0;
        for (const auto& comp : u_) {
            for (const auto& z : comp) {
                m = std::max(m, std::abs(z));
            }
        }
        return m;
    }

    bool all_finite() const
    {
        for (const auto& comp : u_) {
            for (const auto& z : comp) {
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                    return false;
                }
            }
        }
        return true;
    }

private:
    void require_same_grid(const SpectralVelocity& o) const
    {
        if (!(grid_ == o.grid_)) {
            throw grid_mismatch("fields live on different grids");
        }
    }

    Grid grid_;
    std::array<coefficients, 2> u_;
};

/// Velocity sampled at the nodes x_i = 2 pi i / m.
struct PhysicalVelocity {
    int m = 0;
    std::array<std::vector<double>, 2> u;
};

namespace detail {

inline std::vector<cplx> synthesize(const Grid& grid, const std::vector<cplx>& coeffs, int m)
{
    const int n = grid.n();
    std::vector<cplx> buf(static_cast<std::size_t>(m) * m);
    if (m == n) {
        buf = coeffs;
    } else {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (coeffs[i] == cplx{}) {
                continue;
            }
            const int a = grid.kx(i) >= 0 ? grid.kx(i) : grid.kx(i) + m;
            const int b = grid.ky(i) >= 0 ? grid.ky(i) : grid.ky(i) + m;
            buf[static_cast<std::size_t>(a) * m + b] = coeffs[i];
        }
    }
    plan_for(m).backward(buf);
    return buf;
}

inline std::vector<double> real_part(const std::vector<cplx>& v)
{
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](const cplx& z) { return z.real(); });
    return out;
}

// Forward transform of a real sample on grid n, normalized and with exact
// Hermitian symmetry restored.
inline std::vector<cplx> analyze(const Grid& grid, const std::vector<double>& samples)
{
    const int n = grid.n();
    std::vector<cplx> buf(samples.begin(), samples.end());
    plan_for(n).forward(buf);
    const double scale = 1.0 / (static_cast<double>(n) * n);
    std::vector<cplx> out(buf.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.active(i)) {
            continue;
        }
        const cplx mirror = std::conj(buf[grid.flat(-grid.kx(i), -grid.ky(i))]);
        out[i] = 0.5 * scale * (buf[i] + mirror);
    }
    return out;
}

} // namespace detail

inline PhysicalVelocity to_physical(const SpectralVelocity& v, int m = 0)
{
    if (m == 0) {
        m = v.grid().n();
    }
    PhysicalVelocity p;
    p.m = m;
    for (int c = 0; c < 2; ++c) {
        p.u[c] = detail::real_part(detail::synthesize(v.grid(), v.component(c), m));
    }
    return p;
}

inline SpectralVelocity to_spectral(const Grid& grid, const PhysicalVelocity& p)
{
    if (p.m != grid.n()) {
        throw grid_mismatch("physical sample does not match the grid");
    }
    return SpectralVelocity(grid, detail::analyze(grid, p.u[0]), detail::analyze(grid, p.u[1]));
}

inline SpectralVelocity transform_roundtrip(const SpectralVelocity& v)
{
    return to_spectral(v.grid(), to_physical(v));
}

/// (2pi)^2 sum_xi a^(xi) . conj(b^(xi)), real part.
inline double inner_product(const SpectralVelocity& a, const SpectralVelocity& b)
{
    if (!(a.grid() == b.grid())) {
        throw grid_mismatch("inner product of fields on different grids");
    }
    double s = 0.0;
    for (int c = 0; c < 2; ++c) {
        const auto& x = a.component(c);
        const auto& y = b.component(c);
        for (std::size_t i = 0; i < x.size(); ++i) {
            s += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        }
    }
    return torus_area * s;
}

inline double norm_l2(const SpectralVelocity& v)
{
    double s = 0.0;
    for (int c = 0; c < 2; ++c) {
        for (const auto& z : v.component(c)) {
            s += std::norm(z);
        }
    }
    return two_pi * std::sqrt(s);
}

inline double norm_grad_l2(const SpectralVelocity& v)
{
    const Grid& g = v.grid();
    double s = 0.0;
    for (int c = 0; c < 2; ++c) {
        const auto& u = v.component(c);
        for (std::size_t i = 0; i < g.size(); ++i) {
            s += g.eigenvalue(i) * std::norm(u[i]);
        }
    }
    return two_pi * std::sqrt(s);
}

/// L^4 norm of |u| by quadrature on the 2x-oversampled grid, which is exact
/// for the quartic integrand of a band-limited field.
inline double norm_l4(const SpectralVelocity& v)
{
    const int m = 2 * v.grid().n();
    const PhysicalVelocity p = to_physical(v, m);
    double s = 0.0;
    for (std::size_t i = 0; i < p.u[0].size(); ++i) {
        const double q = p.u[0][i] * p.u[0][i] + p.u[1][i] * p.u[1][i];
        s += q * q;
    }
    const double quartic = torus_area * s / (static_cast<double>(m) * m);
    return std::sqrt(std::sqrt(quartic));
}

/// Physical-space quadrature of |u|^2 on the native grid.
inline double physical_energy(const SpectralVelocity& v)
{
    const PhysicalVelocity p = to_physical(v);
    double s = 0.0;
    for (std::size_t i = 0; i < p.u[0].size(); ++i) {
        s += p.u[0][i] * p.u[0][i] + p.u[1][i] * p.u[1][i];
    }
    return torus_area * s / (static_cast<double>(p.m) * p.m);
}

inline double max_abs_velocity(const SpectralVelocity& v)
{
    const PhysicalVelocity p = to_physical(v);
    double m = 0.0;
    for (std::size_t i = 0; i < p.u[0].size(); ++i) {
        m = std::max(m, std::hypot(p.u[0][i], p.u[1][i]));
    }
    return m;
}

/// Modewise P(xi) = I - xi xi^T / |xi|^2, P(0) = 0.
inline SpectralVelocity leray_project(const SpectralVelocity& v)
{
    const Grid& g = v.grid();
    return v.map_modes([&g](std::size_t i, cplx a, cplx b) -> std::pair<cplx, cplx> {
        const double k2 = g.eigenvalue(i);
        if (k2 == 0.0) {
            return {0.0, 0.0};
        }
        const double kx = g.kx(i);
        const double ky = g.ky(i);
        const cplx dot = (kx * a + ky * b) / k2;
        return {a - kx * dot, b - ky * dot};
    });
}

inline SpectralVelocity laplacian(const SpectralVelocity& v)
{
    const Grid& g = v.grid();
    return v.map_modes([&g](std::size_t i, cplx a, cplx b) -> std::pair<cplx, cplx> {
        const double k2 = g.eigenvalue(i);
        return {-k2 * a, -k2 * b};
    });
}

/// Zero every mode with |xi|_inf above the dealiasing cutoff.
inline SpectralVelocity band_limit(const SpectralVelocity& v)
{
    const Grid& g = v.grid();
    return v.map_modes([&g](std::size_t i, cplx a, cplx b) -> std::pair<cplx, cplx> {
        if (!g.in_band(i)) {
            return {0.0, 0.0};
        }
        return {a, b};
    });
}

struct FieldDiagnostics {
    double hermitian_error = 0.0; // max |u(-xi) - conj u(xi)| / max |u|
    double mean = 0.0;            // |u^(0)|
    double divergence = 0.0;      // max |xi . u^(xi)| / max |u|
    double nyquist = 0.0;         // max modulus on the Nyquist row/column

    bool ok(double hermitian_tol = 1e-12, double divergence_tol = 1e-10) const
    {
        return hermitian_error <= hermitian_tol && mean == 0.0 && divergence <= divergence_tol
            && nyquist == 0.0;
    }
};

inline FieldDiagnostics check_invariants(const SpectralVelocity& v)
{
    const Grid& g = v.grid();
    FieldDiagnostics d;
    const double scale = v.max_abs();
    const double inv = scale > 0.0 ? 1.0 / scale : 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx a = v.component(0)[i];
        const cplx b = v.component(1)[i];
        if (!g.active(i)) {
            d.nyquist = std::max({d.nyquist, std::abs(a), std::abs(b)});
            continue;
        }
        const std::size_t j = g.flat(-g.kx(i), -g.ky(i));
        d.hermitian_error = std::max({d.hermitian_error, std::abs(v.component(0)[j] - std::conj(a)) * inv,
                                      std::abs(v.component(1)[j] - std::conj(b)) * inv});
        d.divergence = std::max(d.divergence, std::abs(static_cast<double>(g.kx(i)) * a + static_cast<double>(g.ky(i)) * b) * inv);
    }
    d.mean = std::max(std::abs(v.component(0)[0]), std::abs(v.component(1)[0]));
    return d;
}

namespace detail {

// Spectral divergence of the tensor with entries p[i][j] = (a_i b_j)(x),
// followed by band truncation, Leray projection and a sign flip:
// returns -P div(a (x) b). A symmetric tensor skips the p[1][0] transform.
inline SpectralVelocity projected_divergence(const Grid& g, const std::array<std::array<std::vector<double>, 2>, 2>& p,
                                             bool symmetric = false)
{
    std::array<std::array<std::vector<cplx>, 2>, 2> hat;
    hat[0][0] = analyze(g, p[0][0]);
    hat[0][1] = analyze(g, p[0][1]);
    hat[1][1] = analyze(g, p[1][1]);
    hat[1][0] = symmetric ? hat[0][1] : analyze(g, p[1][0]);
    SpectralVelocity::coefficients n1(g.size());
    SpectralVelocity::coefficients n2(g.size());
    const cplx I{0.0, 1.0};
    for (std::size_t m = 0; m < g.size(); ++m) {
        if (!g.active(m) || !g.in_band(m)) {
            continue;
        }
        const double kx = g.kx(m);
        const double ky = g.ky(m);
        n1[m] = -I * (kx * hat[0][0][m] + ky * hat[0][1][m]);
        n2[m] = -I * (kx * hat[1][0][m] + ky * hat[1][1][m]);
    }
    return leray_project(SpectralVelocity(g, std::move(n1), std::move(n2)));
}

// projected_divergence with modes below floor * max|p| * cutoff zeroed.
// Transform roundoff sits there and later Laplacians amplify it.
inline SpectralVelocity floored_divergence(const Grid& g, const std::array<std::array<std::vector<double>, 2>, 2>& p,
                                           bool symmetric, double floor)
{
    SpectralVelocity nl = projected_divergence(g, p, symmetric);
    if (!(floor > 0.0)) {
        return nl;
    }
    double pmax = 0.0;
    for (const auto& row : p) {
        for (const auto& v : row) {
            for (double x : v) {
                pmax = std::max(pmax, std::abs(x));
            }
        }
    }
    const double cut = floor * pmax * g.dealias_cutoff();
    SpectralVelocity::coefficients c0 = nl.component(0);
    SpectralVelocity::coefficients c1 = nl.component(1);
    for (std::size_t m = 0; m < g.size(); ++m) {
        // both components together, so the mode stays divergence free
        if (std::max(std::abs(c0[m]), std::abs(c1[m])) < cut) {
            c0[m] = cplx{};
            c1[m] = cplx{};
        }
    }
    return SpectralVelocity(g, std::move(c0), std::move(c1));
}

// Physical samples of the band-limited part of a field, reusable across
// many products.
inline PhysicalVelocity band_physical(const SpectralVelocity& v) { return to_physical(band_limit(v)); }

} // namespace detail

inline constexpr double default_roundoff_floor = 1e-13;

/// -P div(a (x) b) with (a (x) b)_{ij} = a_i b_j, dealiased by the 2/3 rule.
/// A positive roundoff_floor drops modes below that fraction of the product
/// scale (see detail::floored_divergence).
inline SpectralVelocity nonlinear_term(const SpectralVelocity& a, const SpectralVelocity& b,
                                       double roundoff_floor = 0.0)
{
    if (!(a.grid() == b.grid())) {
        throw grid_mismatch("nonlinear term of fields on different grids");
    }
    const bool same = &a == &b;
    const PhysicalVelocity pa = detail::band_physical(a);
    const PhysicalVelocity pb = same ? PhysicalVelocity{} : detail::band_physical(b);
    const PhysicalVelocity& rb = same ? pa : pb;
    std::array<std::array<std::vector<double>, 2>, 2> prod;
    const std::size_t sz = pa.u[0].size();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            prod[i][j].resize(sz);
            for (std::size_t x = 0; x < sz; ++x) {
                prod[i][j][x] = pa.u[i][x] * rb.u[j][x];
            }
        }
    }
    return detail::floored_divergence(a.grid(), prod, same, roundoff_floor);
}

// ---------------------------------------------------------------------------
// Initial data

struct TaylorGreen {
    double amplitude = 1.0;
};

struct Shear {
    double amplitude = 1.0;
};

struct RandomSpectrum {
    double decay = 2.0; // |u^(xi)| ~ |xi|^{-decay}
    int k_max = 8;      // Euclidean cutoff
    std::uint64_t seed = 7;
    double l2_norm = 1.0;
};

using InitialDataSpec = std::variant<TaylorGreen, Shear, RandomSpectrum>;

namespace detail {

inline SpectralVelocity taylor_green_field(const Grid& g, double a)
{
    // (sin x cos y, -cos x sin y)
    SpectralVelocity::coefficients u1(g.size());
    SpectralVelocity::coefficients u2(g.size());
    const cplx I{0.0, 1.0};
    for (int kx : {-1, 1}) {
        for (int ky : {-1, 1}) {
            u1[g.flat(kx, ky)] = -I * (0.25 * a * kx);
            u2[g.flat(kx, ky)] = I * (0.25 * a * ky);
        }
    }
    return SpectralVelocity(g, std::move(u1), std::move(u2));
}

inline SpectralVelocity shear_field(const Grid& g, double a)
{
    // (sin y, 0)
    SpectralVelocity::coefficients u1(g.size());
    SpectralVelocity::coefficients u2(g.size());
    const cplx I{0.0, 1.0};
    u1[g.flat(0, 1)] = -I * (0.5 * a);
    u1[g.flat(0, -1)] = I * (0.5 * a);
    return SpectralVelocity(g, std::move(u1), std::move(u2));
}

// Modes are visited in an order that depends on k_max only, so the same
// seed yields the same field on every grid that resolves it.
inline SpectralVelocity random_field(const Grid& g, const RandomSpectrum& spec)
{
    SpectralVelocity::coefficients u1(g.size());
    SpectralVelocity::coefficients u2(g.size());
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int k = spec.k_max;
    for (int kx = -k; kx <= k; ++kx) {
        for (int ky = -k; ky <= k; ++ky) {
            if (!(kx > 0 || (kx == 0 && ky > 0))) {
                continue;
            }
            const double k2 = static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
            if (k2 > static_cast<double>(k) * k) {
                continue;
            }
            const double amp = std::pow(k2, -0.5 * spec.decay);
            const cplx a{normal(rng), normal(rng)};
            const cplx b{normal(rng), normal(rng)};
            u1[g.flat(kx, ky)] = amp * a;
            u2[g.flat(kx, ky)] = amp * b;
            u1[g.flat(-kx, -ky)] = amp * std::conj(a);
            u2[g.flat(-kx, -ky)] = amp * std::conj(b);
        }
    }
    return leray_project(SpectralVelocity(g, std::move(u1), std::move(u2)));
}

} // namespace detail

inline SpectralVelocity make_initial_data(const InitialDataSpec& spec, const Grid& grid)
{
    struct visitor {
        const Grid& g;
        SpectralVelocity operator()(const TaylorGreen& tg) const
        {
            if (!(tg.amplitude > 0.0)) {
                throw config_error("taylor_green amplitude must be positive");
            }
            return detail::taylor_green_field(g, tg.amplitude);
        }
        SpectralVelocity operator()(const Shear& s) const
        {
            if (!(s.amplitude > 0.0)) {
                throw config_error("shear amplitude must be positive");
            }
            return detail::shear_field(g, s.amplitude);
        }
        SpectralVelocity operator()(const RandomSpectrum& r) const
        {
            if (r.k_max < 1 || r.k_max > g.max_wavenumber()) {
                throw config_error("random_spectrum k_max must lie in [1, n/2 - 1]");
            }
            if (!(r.l2_norm > 0.0) || !std::isfinite(r.decay)) {
                throw config_error("random_spectrum needs a positive l2_norm and finite decay");
            }
            SpectralVelocity v = detail::random_field(g, r);
            const double norm = norm_l2(v);
            if (!(norm > 0.0)) {
                throw config_error("random_spectrum produced a zero field");
            }
            return (r.l2_norm / norm) * std::move(v);
        }
    };
    return std::visit(visitor{grid}, spec);
}

} // namespace gevrey_ns

#endif
