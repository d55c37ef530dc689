#ifndef GEVREY_NS_GEVREY_FUNCTIONALS_HPP
#define GEVREY_NS_GEVREY_FUNCTIONALS_HPP

// Time-weighted derivative functionals of a trajectory, their two
// renormalizations, the weighted sums bounded by the four decay/Gevrey
// statements, and audits of the combinatorial steps used to prove them.
//
// Raw functionals at time t, for k >= 0:
//   L_{2k}   = t^k ||u^(k)||,          H_{2k}   = t^k ||grad u^(k)||,
//   L_{2k+1} = t^{k+1/2} ||grad u^(k)||, H_{2k+1} = t^{k+1/2} ||u^(k+1)||.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gevrey_ns/errors.hpp"
#include "gevrey_ns/special_functions.hpp"
#include "gevrey_ns/spectral_core.hpp"
#include "gevrey_ns/stokes_semigroup.hpp"

namespace gevrey_ns {

inline constexpr double ln2 = std::numbers::ln2;

struct FunctionalSample {
    double t = 0.0;
    /// Weight time: equals t, or t - t0 for the shifted functionals.
    double tau = 0.0;
    int M = 0;
    std::vector<double> L_raw;
    std::vector<double> H_raw;
    /// Populated by renormalize / shifted_functionals.
    double alpha = 0.0;
    std::vector<double> L_tilde;
    std::vector<double> H_tilde;
    std::vector<double> L_c;
    std::vector<double> H_c;
};

namespace detail {

// Raw functionals from ||u^(k)|| and ||grad u^(k)||, k = 0..K, weighted by
// powers of tau.
inline FunctionalSample functionals_from_norms(double t, double tau, const std::vector<double>& l2,
                                               const std::vector<double>& grad)
{
    const int K = static_cast<int>(l2.size()) - 1;
    FunctionalSample s;
    s.t = t;
    s.tau = tau;
    s.M = 2 * K;
    s.L_raw.resize(static_cast<std::size_t>(s.M) + 1);
    s.H_raw.resize(static_cast<std::size_t>(s.M) + 1);
    for (int k = 0; k <= K; ++k) {
        const double pk = std::pow(tau, k);
        s.L_raw[2 * k] = pk * l2[k];
        s.H_raw[2 * k] = pk * grad[k];
        if (k < K) {
            const double ph = std::pow(tau, k + 0.5);
            s.L_raw[2 * k + 1] = ph * grad[k];
            s.H_raw[2 * k + 1] = ph * l2[k + 1];
        }
    }
    return s;
}

// m -> k with the c-sequence index of the renormalization.
inline int c_index(int m) { return m % 2 == 0 ? m / 2 : (m + 1) / 2; }

// log of the factor turning a raw functional into its tilde form.
inline double log_tilde_factor(int m)
{
    if (m % 2 == 0) {
        const int k = m / 2;
        return -(k * ln2 + log_factorial(k));
    }
    const int k = (m + 1) / 2;
    return 0.5 * ln2 - k * ln2 - 0.5 * (log_factorial(k - 1) + log_factorial(k));
}

inline double scale_log(double value, double log_factor)
{
    if (value == 0.0) {
        return 0.0;
    }
    return std::exp(std::log(value) + log_factor);
}

} // namespace detail

/// Raw functionals L_m, H_m for m <= 2K from a stack with entries 0..K.
inline FunctionalSample raw_functionals(const DerivativeStack& stack)
{
    if (stack.entries.empty()) {
        throw config_error("raw_functionals of an empty stack");
    }
    std::vector<double> l2;
    std::vector<double> grad;
    for (const auto& e : stack.entries) {
        l2.push_back(norm_l2(e));
        grad.push_back(norm_grad_l2(e));
    }
    return detail::functionals_from_norms(stack.t, stack.t, l2, grad);
}

/// Raw functionals from a rescaled stack w_k = t^k u^(k) / (2^k k!),
/// reconstructed in log space.
inline FunctionalSample raw_functionals_from_scaled(const DerivativeStack& scaled)
{
    const int K = scaled.depth();
    const double t = scaled.t;
    FunctionalSample s;
    s.t = t;
    s.tau = t;
    s.M = 2 * K;
    s.L_raw.assign(static_cast<std::size_t>(s.M) + 1, 0.0);
    s.H_raw.assign(static_cast<std::size_t>(s.M) + 1, 0.0);
    std::vector<double> lw;
    std::vector<double> gw;
    for (const auto& e : scaled.entries) {
        lw.push_back(norm_l2(e));
        gw.push_back(norm_grad_l2(e));
    }
    s.L_raw[0] = lw[0];
    s.H_raw[0] = gw[0];
    if (t == 0.0) {
        return s;
    }
    const auto unscale = [](double w, int k) { return detail::scale_log(w, k * ln2 + log_factorial(k)); };
    for (int k = 0; k <= K; ++k) {
        s.L_raw[2 * k] = unscale(lw[k], k);
        s.H_raw[2 * k] = unscale(gw[k], k);
        if (k < K) {
            s.L_raw[2 * k + 1] = std::sqrt(t) * s.H_raw[2 * k];
            s.H_raw[2 * k + 1] = unscale(lw[k + 1], k + 1) / std::sqrt(t);
        }
    }
    return s;
}

/// Fills the tilde arrays (division by 2^k k!, or sqrt2 / (2^k sqrt((k-1)! k!))
/// for odd m = 2k-1) and the c-normalized arrays (further division by
/// c_k = (k!)^alpha).
inline FunctionalSample renormalize(FunctionalSample s, double alpha)
{
    if (!(alpha > 0.0)) {
        throw config_error("renormalize needs alpha > 0");
    }
    s.alpha = alpha;
    const std::size_t count = s.L_raw.size();
    s.L_tilde.resize(count);
    s.H_tilde.resize(count);
    s.L_c.resize(count);
    s.H_c.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const int m = static_cast<int>(i);
        const double lt = detail::log_tilde_factor(m);
        const double lc = -log_gevrey_sequence(detail::c_index(m), alpha);
        s.L_tilde[i] = detail::scale_log(s.L_raw[i], lt);
        s.H_tilde[i] = detail::scale_log(s.H_raw[i], lt);
        s.L_c[i] = detail::scale_log(s.L_raw[i], lt + lc);
        s.H_c[i] = detail::scale_log(s.H_raw[i], lt + lc);
    }
    return s;
}

/// Functionals with weights (t - t0) in place of t, renormalized.
inline FunctionalSample shifted_functionals(const DerivativeStack& stack, double t0, double alpha)
{
    if (!(t0 >= 0.0) || !(t0 < stack.t)) {
        throw config_error("shifted functionals need 0 <= t0 < t");
    }
    std::vector<double> l2;
    std::vector<double> grad;
    for (const auto& e : stack.entries) {
        l2.push_back(norm_l2(e));
        grad.push_back(norm_grad_l2(e));
    }
    return renormalize(detail::functionals_from_norms(stack.t, stack.t - t0, l2, grad), alpha);
}

// ---------------------------------------------------------------------------
// Quadrature

/// Cumulative composite trapezoid of f over the (strictly increasing) nodes t.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& f)
{
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    }
    return out;
}

/// Richardson estimate |T_h - T_2h| / 3 of the trapezoid error at each node,
/// with T_2h taken on the even-indexed nodes. Odd nodes inherit the
/// estimate of the preceding even node.
inline std::vector<double> trapezoid_error_estimate(const std::vector<double>& t, const std::vector<double>& f)
{
    const std::vector<double> fine = cumulative_trapezoid(t, f);
    std::vector<double> out(t.size(), 0.0);
    double coarse = 0.0;
    double last = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i >= 2 && i % 2 == 0) {
            coarse += (t[i] - t[i - 2]) * (f[i] + f[i - 2]) * 0.5;
            last = std::abs(fine[i] - coarse) / 3.0;
        }
        out[i] = last;
    }
    return out;
}

/// Ordered samples with trapezoid accumulators of H_m^2.
class FunctionalSeries {
public:
    FunctionalSeries() = default;
    explicit FunctionalSeries(std::vector<FunctionalSample> samples) : samples_(std::move(samples))
    {
        for (std::size_t i = 1; i < samples_.size(); ++i) {
            if (!(samples_[i].t > samples_[i - 1].t)) {
                throw config_error("functional series times must be strictly increasing");
            }
        }
    }

    void push_back(FunctionalSample s)
    {
        if (!samples_.empty() && !(s.t > samples_.back().t)) {
            throw config_error("functional series times must be strictly increasing");
        }
        samples_.push_back(std::move(s));
    }

    const std::vector<FunctionalSample>& samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }

    std::vector<double> times() const
    {
        std::vector<double> t;
        for (const auto& s : samples_) {
            t.push_back(s.t);
        }
        return t;
    }

    /// Smallest truncation index M over the samples.
    int depth() const
    {
        int m = std::numeric_limits<int>::max();
        for (const auto& s : samples_) {
            m = std::min(m, s.M);
        }
        return samples_.empty() ? 0 : m;
    }

    /// Cumulative trapezoid of weight(t) * H_m(t)^2.
    std::vector<double> integrated_h_sq(int m, const std::function<double(double)>& weight = {}) const
    {
        const auto t = times();
        std::vector<double> f(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double h = samples_[i].H_raw[static_cast<std::size_t>(m)];
            f[i] = h * h * (weight ? weight(t[i]) : 1.0);
        }
        return cumulative_trapezoid(t, f);
    }

private:
    std::vector<FunctionalSample> samples_;
};

// ---------------------------------------------------------------------------
// Theorem weight tables

enum class WeightVariant {
    statement, // as displayed in each theorem
    proof,     // normalization produced by the L_m / H_m machinery
};

struct TheoremParams {
    int n = 0;           // truncation order of the large-data bound
    double gamma = 0.0;  // algebraic decay rate for the faster-decay bound
    WeightVariant variant = WeightVariant::statement;
    /// When set, integrals of the faster-decay bound start at this time.
    std::optional<double> integral_start;
};

/// log weights multiplying L_m(t)^2 (state) and int H_m^2 (integral).
struct WeightTable {
    std::vector<double> log_state;
    std::vector<double> log_integral;
    double time_power = 0.0; // extra factor t^{time_power} on both parts
    bool finite_sum = false; // the statement sums over k <= n only
};

inline WeightTable theorem_weights(int theorem, double alpha, int M, const TheoremParams& p = {})
{
    if (theorem < 1 || theorem > 4) {
        throw config_error("theorem id must be 1, 2, 3 or 4");
    }
    if (!(alpha > 0.0)) {
        throw config_error("alpha must be positive");
    }
    const double a = p.variant == WeightVariant::proof ? 2.0 * alpha : alpha;
    const int two_k_base = theorem == 4 ? 4 : 2; // power of 2 per k
    WeightTable w;
    int m_max = M;
    if (theorem == 2) {
        m_max = 2 * p.n + 1;
        w.finite_sum = true;
    }
    w.log_state.resize(static_cast<std::size_t>(m_max) + 1);
    w.log_integral.resize(static_cast<std::size_t>(m_max) + 1);
    for (int m = 0; m <= m_max; ++m) {
        const int k = m / 2;
        double state = 0.0;
        if (m % 2 == 0) {
            state = -(two_k_base * k * ln2 + (2.0 + a) * log_factorial(k));
        } else {
            state = -((two_k_base * k + 1) * ln2 + log_factorial(k) + (1.0 + a) * log_factorial(k + 1));
        }
        double integral = state;
        switch (theorem) {
        case 1:
            integral = state - ln2;
            break;
        case 2:
            if (p.variant == WeightVariant::proof) {
                integral = state - ln2;
            } else {
                integral = (m % 2 == 0 ? state - ln2 : state) - ln2;
            }
            break;
        case 3:
            if (p.variant == WeightVariant::proof) {
                integral = state - ln2;
            } else {
                integral = m % 2 == 0 ? state - ln2 : state;
            }
            break;
        default:
            break;
        }
        w.log_state[m] = state;
        w.log_integral[m] = integral;
    }
    if (theorem == 4) {
        w.time_power = 2.0 * p.gamma;
    }
    return w;
}

struct LhsSeries {
    std::vector<double> times;
    std::vector<double> lhs;
    std::vector<double> state;
    std::vector<double> integral;
    std::vector<double> quadrature_error;
    std::vector<double> tail_estimate;
    int truncation = 0;
};

namespace detail {

inline double weighted_sq(double value, double log_weight)
{
    if (value == 0.0) {
        return 0.0;
    }
    if (log_weight == 0.0) {
        return value * value;
    }
    return std::exp(2.0 * std::log(value) + log_weight);
}

// Geometric extrapolation from the last two complete (even, odd) pairs.
inline double pair_tail(const std::vector<double>& terms)
{
    const int M = static_cast<int>(terms.size()) - 1;
    const int last_pair = (M - 1) / 2; // largest k with 2k+1 <= M
    if (last_pair < 1) {
        return std::numeric_limits<double>::infinity();
    }
    const double p1 = terms[2 * last_pair] + terms[2 * last_pair + 1];
    const double p0 = terms[2 * last_pair - 2] + terms[2 * last_pair - 1];
    if (p1 == 0.0) {
        return 0.0;
    }
    const double rho = p1 / p0;
    if (!(rho < 1.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return p1 * rho / (1.0 - rho);
}

} // namespace detail

/// Left-hand side of theorem `theorem` on every sample of the series.
inline LhsSeries theorem_lhs(const FunctionalSeries& series, int theorem, double alpha, const TheoremParams& p = {})
{
    if (series.empty()) {
        throw config_error("theorem_lhs of an empty series");
    }
    const int available = series.depth();
    const int required = theorem == 2 ? 2 * p.n + 1 : 2;
    if (available < required) {
        throw config_error("insufficient stack depth: theorem " + std::to_string(theorem) + " needs K >= "
                           + std::to_string((required + 1) / 2) + " (have K = " + std::to_string(available / 2)
                           + ")");
    }
    const WeightTable w = theorem_weights(theorem, alpha, available, p);
    const int M = static_cast<int>(w.log_state.size()) - 1;
    const auto& samples = series.samples();
    const auto t = series.times();
    const std::size_t count = t.size();
    const double start = p.integral_start.value_or(-std::numeric_limits<double>::infinity());

    // Weighted integrands and their integrals for each m.
    std::vector<std::vector<double>> integral(static_cast<std::size_t>(M) + 1);
    std::vector<std::vector<double>> qerr(static_cast<std::size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) {
        std::vector<double> nodes;
        std::vector<double> f;
        std::vector<std::size_t> map(count, 0);
        for (std::size_t i = 0; i < count; ++i) {
            if (t[i] < start) {
                continue;
            }
            map[i] = nodes.size();
            nodes.push_back(t[i]);
            const double tp = w.time_power == 0.0 ? 1.0 : std::pow(t[i], w.time_power);
            f.push_back(tp * detail::weighted_sq(samples[i].H_raw[m], w.log_integral[m]));
        }
        const auto cum = cumulative_trapezoid(nodes, f);
        const auto est = trapezoid_error_estimate(nodes, f);
        integral[m].assign(count, 0.0);
        qerr[m].assign(count, 0.0);
        for (std::size_t i = 0; i < count; ++i) {
            if (t[i] < start) {
                continue;
            }
            integral[m][i] = cum[map[i]];
            qerr[m][i] = est[map[i]];
        }
    }

    LhsSeries out;
    out.truncation = M;
    for (std::size_t i = 0; i < count; ++i) {
        const double tp = w.time_power == 0.0 ? 1.0 : std::pow(t[i], w.time_power);
        double state = 0.0;
        double integ = 0.0;
        double err = 0.0;
        std::vector<double> terms(static_cast<std::size_t>(M) + 1);
        for (int m = 0; m <= M; ++m) {
            const double s = tp * detail::weighted_sq(samples[i].L_raw[m], w.log_state[m]);
            state += s;
            integ += integral[m][i];
            err += qerr[m][i];
            terms[m] = s + integral[m][i];
        }
        out.times.push_back(t[i]);
        out.state.push_back(state);
        out.integral.push_back(integ);
        out.lhs.push_back(state + integ);
        out.quadrature_error.push_back(err);
        out.tail_estimate.push_back(w.finite_sum ? 0.0 : detail::pair_tail(terms));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Right-hand sides and conditions

struct LogValue {
    double log_value = 0.0;
    double value = 0.0;      // +inf when log_value exceeds the double range
    bool overflow = false;
};

/// C_alpha^{2^n - 1} (||u0||^2 exp(C0^2 ||u0||^2 / 2))^{2^n}, in log space.
inline LogValue theorem2_rhs(double u0_l2, double c0, double alpha, int n)
{
    if (!(u0_l2 > 0.0) || !(c0 > 0.0) || !(alpha > 0.0) || n < 0) {
        throw config_error("theorem2_rhs needs positive inputs and n >= 0");
    }
    const double e = u0_l2 * u0_l2;
    const double pow2 = std::ldexp(1.0, n);
    LogValue r;
    r.log_value = (pow2 - 1.0) * std::log(c_alpha(alpha)) + pow2 * (std::log(e) + 0.5 * c0 * c0 * e);
    r.overflow = r.log_value > std::log(std::numeric_limits<double>::max());
    r.value = r.overflow ? std::numeric_limits<double>::infinity() : std::exp(r.log_value);
    return r;
}

struct SmallnessCheck {
    double value = 0.0; // 8 C0 C_alpha ||u0||
    bool satisfied = false;
};

inline SmallnessCheck smallness_check(double u0_l2, double c0, double alpha)
{
    if (!(u0_l2 >= 0.0) || !(c0 > 0.0) || !(alpha > 0.0)) {
        throw config_error("smallness_check needs nonnegative norm and positive C0, alpha");
    }
    SmallnessCheck s;
    s.value = 8.0 * c0 * c_alpha(alpha) * u0_l2;
    s.satisfied = s.value < 1.0;
    return s;
}

/// Fluctuation bound 64 C0^2 C_alpha^2 ||u0||^2 int_0^t sum_k (H_k^ell)^2
/// together with the time T0 below which it is established.
class Theorem3Bound {
public:
    Theorem3Bound(double u0_l2, double c0, double alpha, StokesSeries series, double horizon)
        : u0_l2_(u0_l2), c0_(c0), ca_(c_alpha(alpha)), series_(std::move(series)), horizon_(horizon)
    {
        if (!(u0_l2 >= 0.0) || !(c0 > 0.0) || !(horizon > 0.0)) {
            throw config_error("theorem3 bound needs u0_l2 >= 0, C0 > 0 and a positive horizon");
        }
        // 8 C0 Ca ||u0|| sqrt(I(T0)) < 1 / (32 C0 Ca)  <=>  I(T0) < threshold
        const double d = 256.0 * c0_ * c0_ * ca_ * ca_ * u0_l2_;
        threshold_ = d > 0.0 ? 1.0 / (d * d) : std::numeric_limits<double>::infinity();
        if (series_.integrated_h_sum_sq(horizon_) < threshold_) {
            t0_ = horizon_;
            reached_horizon_ = true;
            return;
        }
        double lo = 0.0;
        double hi = horizon_;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (series_.integrated_h_sum_sq(mid) < threshold_ ? lo : hi) = mid;
        }
        t0_ = lo;
    }

    double T0() const noexcept { return t0_; }
    bool reached_horizon() const noexcept { return reached_horizon_; }
    double threshold() const noexcept { return threshold_; }
    const StokesSeries& series() const noexcept { return series_; }

    double rhs(double t) const
    {
        return 64.0 * c0_ * c0_ * ca_ * ca_ * u0_l2_ * u0_l2_ * series_.integrated_h_sum_sq(t);
    }

private:
    double u0_l2_;
    double c0_;
    double ca_;
    StokesSeries series_;
    double horizon_;
    double threshold_ = 0.0;
    double t0_ = 0.0;
    bool reached_horizon_ = false;
};

inline Theorem3Bound theorem3_rhs(double u0_l2, double c0, double alpha, StokesSeries series, double horizon)
{
    return Theorem3Bound(u0_l2, c0, alpha, std::move(series), horizon);
}

// ---------------------------------------------------------------------------
// Lemma audits

struct CccRow {
    int k = 0;
    int j = 0;
    double alpha = 0.0;
    double ratio = 0.0;           // c_j c_{k-j} / c_k = C(k, j)^{-alpha}
    double printed_bound = 0.0;   // min(2^{-j alpha}, 2^{-(k-j) alpha})
    double corrected_bound = 0.0; // 2^{-alpha min(j, k-j)}
    bool printed_ok = false;
    bool corrected_ok = false;
};

struct CccAudit {
    std::vector<CccRow> rows;
    std::vector<CccRow> printed_violations;
    std::vector<CccRow> corrected_violations;
};

inline CccAudit lemma_audit_ccc0(int k_max, const std::vector<double>& alphas, double rel_tol = 1e-12)
{
    if (k_max < 2) {
        throw config_error("ccc0 audit needs k_max >= 2");
    }
    CccAudit audit;
    for (double alpha : alphas) {
        if (!(alpha > 0.0)) {
            throw config_error("ccc0 audit needs positive alpha");
        }
        for (int k = 0; k <= k_max; ++k) {
            for (int j = 0; j <= k; ++j) {
                CccRow r;
                r.k = k;
                r.j = j;
                r.alpha = alpha;
                r.ratio = std::exp(-alpha * log_binomial(k, j));
                r.printed_bound = std::min(std::exp2(-j * alpha), std::exp2(-(k - j) * alpha));
                r.corrected_bound = std::exp2(-alpha * std::min(j, k - j));
                r.printed_ok = r.ratio <= r.printed_bound * (1.0 + rel_tol);
                r.corrected_ok = r.ratio <= r.corrected_bound * (1.0 + rel_tol);
                audit.rows.push_back(r);
                if (!r.printed_ok) {
                    audit.printed_violations.push_back(r);
                }
                if (!r.corrected_ok) {
                    audit.corrected_violations.push_back(r);
                }
            }
        }
    }
    return audit;
}

/// sum_k sum_{j<=k} a_j b_{k-j} c_k over k <= n and the Young bound
/// ||a||_{4/3} ||b||_{4/3} ||c||_2.
struct ConvolutionTerms {
    double lhs = 0.0;
    double rhs = 0.0;
};

inline ConvolutionTerms convolution_terms(const std::vector<double>& a, const std::vector<double>& b,
                                          const std::vector<double>& c)
{
    const std::size_t n = std::max({a.size(), b.size(), c.size()});
    const auto get = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : 0.0; };
    ConvolutionTerms r;
    for (std::size_t k = 0; k < n; ++k) {
        double conv = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            conv += get(a, j) * get(b, k - j);
        }
        r.lhs += conv * get(c, k);
    }
    const auto lp = [](const std::vector<double>& v, double p) {
        double s = 0.0;
        for (double x : v) {
            s += std::pow(x, p);
        }
        return std::pow(s, 1.0 / p);
    };
    r.rhs = lp(a, 4.0 / 3.0) * lp(b, 4.0 / 3.0) * lp(c, 2.0);
    return r;
}

struct ConvolutionAudit {
    int trials = 0;
    double worst_ratio = 0.0;
    int worst_trial = -1;
};

inline ConvolutionAudit lemma_audit_convolution(int trials, int n_max, std::uint64_t seed)
{
    if (trials < 1 || n_max < 1) {
        throw config_error("convolution audit needs trials >= 1 and n_max >= 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> length(1, n_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> shape(0, 3);
    const auto draw = [&](int len) {
        std::vector<double> v(static_cast<std::size_t>(len));
        const int kind = shape(rng);
        const double decay = unit(rng);
        for (int i = 0; i < len; ++i) {
            double x = unit(rng);
            switch (kind) {
            case 1: // sparse
                x = unit(rng) < 0.2 ? x : 0.0;
                break;
            case 2: // geometric profile
                x *= std::pow(decay, i);
                break;
            case 3: // nearly constant
                x = 1.0 + 0.01 * x;
                break;
            default:
                break;
            }
            v[static_cast<std::size_t>(i)] = x;
        }
        return v;
    };
    ConvolutionAudit audit;
    audit.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        const int n = length(rng);
        const auto a = draw(n);
        const auto b = draw(n);
        const auto c = draw(n);
        const auto r = convolution_terms(a, b, c);
        if (r.rhs > 0.0) {
            const double q = r.lhs / r.rhs;
            if (q > audit.worst_ratio) {
                audit.worst_ratio = q;
                audit.worst_trial = trial;
            }
        }
    }
    return audit;
}

// ---------------------------------------------------------------------------
// Algebraic decay fit ||u(t)|| <= K t^{-gamma}

struct DecayFit {
    double K_fit = 0.0;
    double gamma_fit = 0.0;
    double t_a = 0.0;
    double t_b = 0.0;
    double residual = 0.0; // max |log ||u|| - fitted log|| over the window
    int points = 0;
    bool truncated = false;       // window cut where norms fell below 1e-300
    bool super_algebraic = false; // gamma_fit > 10
    bool gamma_positive = false;
};

inline DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& norms, double t_a, double t_b)
{
    if (times.size() != norms.size()) {
        throw config_error("fit_decay needs matching time and norm series");
    }
    if (!(t_a > 0.0) || !(t_b > t_a)) {
        throw config_error("fit_decay window must satisfy 0 < t_a < t_b");
    }
    DecayFit fit;
    fit.t_a = t_a;
    fit.t_b = t_b;
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_a || times[i] > t_b) {
            continue;
        }
        if (!(norms[i] > 1e-300)) {
            fit.truncated = true;
            fit.t_b = times[i];
            break;
        }
        x.push_back(std::log(times[i]));
        y.push_back(std::log(norms[i]));
    }
    fit.points = static_cast<int>(x.size());
    if (fit.points < 4) {
        throw config_error("fit_decay needs at least 4 points in the window");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    const double intercept = my - slope * mx;
    double above = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dev = y[i] - (intercept + slope * x[i]);
        fit.residual = std::max(fit.residual, std::abs(dev));
        above = std::max(above, dev);
    }
    fit.gamma_fit = -slope;
    // Lift the envelope so that it dominates every point of the window.
    fit.K_fit = std::exp(intercept + above);
    fit.super_algebraic = fit.gamma_fit > 10.0;
    fit.gamma_positive = fit.gamma_fit > 1e-10;
    return fit;
}

} // namespace gevrey_ns

#endif
