#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "gevrey_ns/derivative_engine.hpp"
#include "gevrey_ns/gevrey_functionals.hpp"

using namespace gevrey_ns;
using std::numbers::pi;

namespace {

SpectralVelocity shear(double a, int n = 16) { return make_initial_data(Shear{a}, make_grid(n)); }

// Regularized lower incomplete gamma P(a, x) for integer a by its power
// series, summed until the terms stop contributing.
double lower_gamma_p(int a, double x)
{
    if (x == 0.0) {
        return 0.0;
    }
    double log_term = -x + a * std::log(x) - std::lgamma(a + 1.0);
    double s = 0.0;
    for (int n = 0; n < 100000; ++n) {
        const double term = std::exp(log_term);
        s += term;
        if (term < 1e-18 * s) {
            break;
        }
        log_term += std::log(x) - std::log(a + n + 1.0);
    }
    return s;
}

// int_0^t s^m e^{-2s} ds
double moment(int m, double t) { return std::exp(std::lgamma(m + 1.0) - (m + 1) * std::log(2.0)) * lower_gamma_p(m + 1, 2.0 * t); }

double lf(int k) { return std::lgamma(k + 1.0); }

// Theorem-1 state weights as displayed: t^{2k} / (2^{2k} (k!)^{2+a}) and
// t^{2k+1} / (2^{2k+1} k! ((k+1)!)^{1+a}), without the t power.
double thm1_state_weight(int m, double a)
{
    const int k = m / 2;
    if (m % 2 == 0) {
        return std::exp(-2 * k * std::log(2.0) - (2.0 + a) * lf(k));
    }
    return std::exp(-(2 * k + 1) * std::log(2.0) - lf(k) - (1.0 + a) * lf(k + 1));
}

// Single-mode lambda = 1 flow: L_m = H_m = t^{m/2} e^{-t} ||u0||.
double shear_thm1_lhs(double E, double t, double a, int m_max)
{
    double s = 0.0;
    for (int m = 0; m <= m_max; ++m) {
        const double w = thm1_state_weight(m, a);
        s += w * std::pow(t, m) * std::exp(-2.0 * t) * E;
        s += 0.5 * w * E * moment(m, t);
    }
    return s;
}

FunctionalSeries exact_series(const SpectralVelocity& u0, int K, double t_end, int samples)
{
    FunctionalSeries s;
    for (int i = 0; i <= samples; ++i) {
        const double t = t_end * i / samples;
        s.push_back(raw_functionals(time_derivative_stack(heat_evolve(u0, t), K, t)));
    }
    return s;
}

FunctionalSample manual_sample(int M)
{
    FunctionalSample s;
    s.t = 1.0;
    s.tau = 1.0;
    s.M = M;
    for (int m = 0; m <= M; ++m) {
        s.L_raw.push_back(1.0 + m);
        s.H_raw.push_back(2.0 + m);
    }
    return s;
}

} // namespace

TEST(RawFunctionals, ShearAtUnitTime)
{
    const SpectralVelocity u0 = shear(1.0);
    const FunctionalSample f = raw_functionals(time_derivative_stack(heat_evolve(u0, 1.0), 6, 1.0));
    ASSERT_EQ(f.M, 12);
    for (int m = 0; m <= f.M; ++m) {
        EXPECT_NEAR(f.L_raw[m], std::exp(-1.0) * pi * std::sqrt(2.0), 1e-12) << m;
    }
}

TEST(RawFunctionals, TaylorGreenHalfTime)
{
    const SpectralVelocity u0 = make_initial_data(TaylorGreen{1.0}, make_grid(16));
    const FunctionalSample f = raw_functionals(time_derivative_stack(heat_evolve(u0, 0.5), 6, 0.5));
    for (int k = 0; k <= 6; ++k) {
        EXPECT_NEAR(f.L_raw[2 * k], std::exp(-1.0) * pi * std::sqrt(2.0), 1e-12) << k;
    }
}

TEST(RawFunctionals, IndexIdentity)
{
    const SpectralVelocity u = make_initial_data(RandomSpectrum{1.0, 6, 3, 1.5}, make_grid(32));
    for (double t : {0.01, 0.3, 2.0}) {
        const FunctionalSample f = raw_functionals(time_derivative_stack(u, 8, t));
        for (int m = 0; m < f.M; ++m) {
            EXPECT_NEAR(f.L_raw[m + 1], std::sqrt(t) * f.H_raw[m], 1e-12 * std::max(1.0, f.L_raw[m + 1])) << m;
            EXPECT_GE(f.L_raw[m], 0.0);
            EXPECT_TRUE(std::isfinite(f.H_raw[m]));
        }
    }
}

TEST(RawFunctionals, SmallTimeLimit)
{
    const SpectralVelocity u = make_initial_data(RandomSpectrum{1.0, 6, 4, 1.0}, make_grid(16));
    const FunctionalSample f = raw_functionals(time_derivative_stack(u, 4, 0.0));
    EXPECT_EQ(f.L_raw[0], norm_l2(u));
    for (int m = 1; m <= f.M; ++m) {
        EXPECT_EQ(f.L_raw[m], 0.0);
    }
    const FunctionalSample g = raw_functionals(time_derivative_stack(u, 4, 1e-8));
    for (int m = 1; m <= g.M; ++m) {
        EXPECT_LT(g.L_raw[m], 1e-2);
    }
    EXPECT_THROW(raw_functionals(DerivativeStack{}), config_error);
}

TEST(RawFunctionals, ScaledStackReconstruction)
{
    const SpectralVelocity u = make_initial_data(RandomSpectrum{1.0, 6, 5, 1.0}, make_grid(32));
    const double t = 0.2;
    const FunctionalSample a = raw_functionals(time_derivative_stack(u, 8, t));
    const FunctionalSample b = raw_functionals_from_scaled(scaled_derivative_stack(u, t, 8));
    ASSERT_EQ(a.M, b.M);
    for (int m = 0; m <= a.M; ++m) {
        EXPECT_NEAR(b.L_raw[m], a.L_raw[m], 1e-11 * a.L_raw[m]) << m;
        EXPECT_NEAR(b.H_raw[m], a.H_raw[m], 1e-11 * a.H_raw[m]) << m;
    }
}

TEST(Renormalize, DirectFormulas)
{
    const FunctionalSample s = renormalize(manual_sample(6), 1.0);
    EXPECT_DOUBLE_EQ(s.L_tilde[0], s.L_raw[0]);
    EXPECT_DOUBLE_EQ(s.L_c[0], s.L_raw[0]);
    EXPECT_NEAR(s.L_tilde[4], s.L_raw[4] / 8.0, 1e-14);
    EXPECT_NEAR(s.L_c[4], s.L_raw[4] / 16.0, 1e-14);
    EXPECT_NEAR(s.L_tilde[1], std::sqrt(2.0) * s.L_raw[1] / 2.0, 1e-14);
    EXPECT_NEAR(s.L_c[1], s.L_tilde[1], 1e-14);
    // m = 3 (k = 2): sqrt2 / (4 sqrt(1! 2!)), then / (2!)^alpha
    EXPECT_NEAR(s.H_tilde[3], std::sqrt(2.0) * s.H_raw[3] / (4.0 * std::sqrt(2.0)), 1e-14);
    EXPECT_NEAR(s.H_c[3], s.H_tilde[3] / 2.0, 1e-14);
    EXPECT_THROW(renormalize(manual_sample(2), 0.0), config_error);
    EXPECT_THROW(renormalize(manual_sample(2), -1.0), config_error);
}

TEST(Renormalize, LargeIndicesStayFinite)
{
    FunctionalSample s = manual_sample(200);
    for (auto& v : s.L_raw) {
        v = 1e200;
    }
    const FunctionalSample r = renormalize(s, 2.0);
    for (double v : r.L_c) {
        EXPECT_TRUE(std::isfinite(v));
    }
    EXPECT_LT(r.L_c[200], 1e-100);
}

TEST(ShiftedFunctionals, ZeroShiftIsRenormalize)
{
    const SpectralVelocity u = make_initial_data(RandomSpectrum{1.0, 6, 6, 1.0}, make_grid(16));
    const DerivativeStack st = time_derivative_stack(u, 5, 0.7);
    const FunctionalSample a = shifted_functionals(st, 0.0, 1.0);
    const FunctionalSample b = renormalize(raw_functionals(st), 1.0);
    for (int m = 0; m <= a.M; ++m) {
        EXPECT_NEAR(a.L_c[m], b.L_c[m], 1e-14 * b.L_c[m]);
        EXPECT_NEAR(a.H_c[m], b.H_c[m], 1e-14 * b.H_c[m]);
    }
}

TEST(ShiftedFunctionals, ShearClosedForm)
{
    const SpectralVelocity u0 = shear(1.0);
    const double E = norm_l2(u0);
    const double alpha = 1.0;
    const DerivativeStack st = time_derivative_stack(heat_evolve(u0, 2.0), 5, 2.0);
    const FunctionalSample f = shifted_functionals(st, 1.0, alpha);
    for (int k = 0; k <= 5; ++k) {
        const double expect = std::exp(-k * std::log(2.0) - (1.0 + alpha) * lf(k)) * std::exp(-2.0) * E;
        EXPECT_NEAR(f.L_c[2 * k], expect, 1e-13) << k;
    }
    const FunctionalSample g = shifted_functionals(st, 2.0 - 1e-9, alpha);
    for (int m = 1; m <= g.M; ++m) {
        EXPECT_LT(g.L_c[m], 1e-4);
    }
    EXPECT_THROW(shifted_functionals(st, 2.0, alpha), config_error);
    EXPECT_THROW(shifted_functionals(st, -0.1, alpha), config_error);
}

TEST(Quadrature, TrapezoidAndErrorEstimate)
{
    std::vector<double> t;
    std::vector<double> f;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(0.01 * i);
        f.push_back(std::exp(t.back()));
    }
    const auto cum = cumulative_trapezoid(t, f);
    const auto est = trapezoid_error_estimate(t, f);
    const double err = std::abs(cum.back() - (std::exp(1.0) - 1.0));
    EXPECT_NEAR(est.back(), err, 0.01 * err);
    for (std::size_t i = 1; i < cum.size(); ++i) {
        EXPECT_GT(cum[i], cum[i - 1]);
    }
}

TEST(FunctionalSeries, OrderingAndMonotoneAccumulators)
{
    const FunctionalSeries s = exact_series(make_initial_data(RandomSpectrum{1.0, 5, 7, 1.0}, make_grid(16)), 3, 1.0, 50);
    EXPECT_EQ(s.depth(), 6);
    for (int m = 0; m <= 6; ++m) {
        const auto acc = s.integrated_h_sq(m);
        for (std::size_t i = 1; i < acc.size(); ++i) {
            EXPECT_GE(acc[i], acc[i - 1]);
        }
    }
    FunctionalSeries copy = s;
    EXPECT_THROW(copy.push_back(s.samples().front()), config_error);
    const LhsSeries lhs = theorem_lhs(s, 1, 1.0);
    for (std::size_t i = 1; i < lhs.integral.size(); ++i) {
        EXPECT_GE(lhs.integral[i], lhs.integral[i - 1]);
    }
}

TEST(TheoremLhs, InitialTimeIsTheEnergy)
{
    const SpectralVelocity u = make_initial_data(RandomSpectrum{1.0, 6, 8, 0.37}, make_grid(16));
    FunctionalSeries s;
    s.push_back(raw_functionals(time_derivative_stack(u, 4, 0.0)));
    const double e = norm_l2(u) * norm_l2(u);
    for (int th : {1, 3}) {
        const LhsSeries l = theorem_lhs(s, th, 1.0);
        EXPECT_EQ(l.lhs.front(), e);
        EXPECT_EQ(l.tail_estimate.front(), 0.0);
    }
    TheoremParams p;
    p.n = 1;
    EXPECT_EQ(theorem_lhs(s, 2, 1.0, p).lhs.front(), e);
}

TEST(TheoremLhs, ShearMatchesClosedForm)
{
    const SpectralVelocity u0 = shear(0.05);
    const double E = norm_l2(u0) * norm_l2(u0);
    const FunctionalSeries s = exact_series(u0, 8, 1.0, 1000);
    for (double alpha : {0.5, 1.0, 2.0}) {
        const LhsSeries l = theorem_lhs(s, 1, alpha);
        for (std::size_t i = 0; i < l.times.size(); i += 100) {
            const double oracle = shear_thm1_lhs(E, l.times[i], alpha, 80);
            const double budget = 1e-8 + l.quadrature_error[i] + l.tail_estimate[i];
            EXPECT_LE(std::abs(l.lhs[i] - oracle), budget) << alpha << ' ' << l.times[i];
        }
    }
}

TEST(TheoremLhs, InsufficientDepthNamesRequiredK)
{
    const FunctionalSeries s = exact_series(shear(1.0), 4, 0.1, 4);
    TheoremParams p;
    p.n = 4;
    try {
        theorem_lhs(s, 2, 1.0, p);
        FAIL() << "expected config_error";
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("needs K >= 5"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("have K = 4"), std::string::npos) << e.what();
    }
    EXPECT_THROW(theorem_lhs(FunctionalSeries{}, 1, 1.0), config_error);
    EXPECT_THROW(theorem_weights(5, 1.0, 4), config_error);
}

TEST(TheoremWeights, StatementTables)
{
    const double a = 1.0;
    const WeightTable w1 = theorem_weights(1, a, 10);
    for (int m = 0; m <= 10; ++m) {
        EXPECT_NEAR(std::exp(w1.log_state[m]), thm1_state_weight(m, a), 1e-15);
        EXPECT_NEAR(w1.log_integral[m], w1.log_state[m] - std::log(2.0), 1e-14);
    }
    // Faster-decay weights differ only by the 2^{2k} extra denominator.
    TheoremParams p;
    p.gamma = 0.0;
    const WeightTable w4 = theorem_weights(4, a, 10, p);
    EXPECT_EQ(w4.log_state[0], w1.log_state[0]);
    for (int m = 0; m <= 10; ++m) {
        EXPECT_NEAR(w4.log_state[m] - w1.log_state[m], -2 * (m / 2) * std::log(2.0), 1e-13);
    }
    p.n = 2;
    const WeightTable w2 = theorem_weights(2, a, 10, p);
    EXPECT_TRUE(w2.finite_sum);
    EXPECT_EQ(w2.log_state.size(), 6u);
    // even integral weight 1 / 2^{2k+2}..., odd 1 / 2^{2k+2}
    EXPECT_NEAR(w2.log_integral[2] - w2.log_state[2], -2.0 * std::log(2.0), 1e-14);
    EXPECT_NEAR(w2.log_integral[3] - w2.log_state[3], -std::log(2.0), 1e-14);
    const WeightTable w3 = theorem_weights(3, a, 10);
    EXPECT_NEAR(w3.log_integral[3], w3.log_state[3], 1e-15);
    p.variant = WeightVariant::proof;
    const WeightTable w1p = theorem_weights(1, a, 10, p);
    EXPECT_NEAR(w1p.log_state[4], -(4 * std::log(2.0) + 4.0 * lf(2)), 1e-14);
}

TEST(Theorem2Rhs, Values)
{
    EXPECT_NEAR(c_alpha(1.0), 1.154701, 1e-6);
    const LogValue r = theorem2_rhs(1.0, 1.0, 1.0, 1);
    EXPECT_NEAR(r.value, std::sqrt(4.0 / 3.0) * std::exp(1.0), 1e-13);
    EXPECT_NEAR(r.value, 3.1388, 1e-4);
    const LogValue n0 = theorem2_rhs(0.8, 0.3, 2.0, 0);
    EXPECT_NEAR(n0.value, 0.64 * std::exp(0.09 * 0.64 / 2.0), 1e-15);
    const LogValue big = theorem2_rhs(10.0, 1.0, 1.0, 12);
    EXPECT_TRUE(big.overflow);
    EXPECT_TRUE(std::isinf(big.value));
    EXPECT_TRUE(std::isfinite(big.log_value));
    EXPECT_THROW(theorem2_rhs(0.0, 1.0, 1.0, 1), config_error);
    EXPECT_THROW(theorem2_rhs(1.0, 1.0, 1.0, -1), config_error);
}

TEST(Theorem2Rhs, MonotoneInEachArgument)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double e = u(rng);
        const double c = u(rng);
        const double a = u(rng);
        const int n = trial % 6;
        const double base = theorem2_rhs(e, c, a, n).log_value;
        EXPECT_GE(theorem2_rhs(e * 1.1, c, a, n).log_value, base);
        EXPECT_GE(theorem2_rhs(e, c * 1.1, a, n).log_value, base);
        if (theorem2_rhs(e, c, a, 0).log_value >= 0.0) {
            EXPECT_GE(theorem2_rhs(e, c, a, n + 1).log_value, base);
        }
    }
}

TEST(Smallness, ValuesAndStrictness)
{
    const SmallnessCheck s = smallness_check(0.5, 0.2, 1.0);
    EXPECT_NEAR(s.value, 0.92376, 1e-5);
    EXPECT_TRUE(s.satisfied);
    EXPECT_TRUE(smallness_check(1e-12, 0.2, 1.0).satisfied);
    // C_alpha rounds to exactly 1 for large alpha.
    ASSERT_EQ(c_alpha(40.0), 1.0);
    const SmallnessCheck edge = smallness_check(1.0, 0.125, 40.0);
    EXPECT_EQ(edge.value, 1.0);
    EXPECT_FALSE(edge.satisfied);
}

TEST(Theorem3Bound, VanishingDataReachesHorizon)
{
    const SpectralVelocity u0 = shear(1e-9);
    const Theorem3Bound b = theorem3_rhs(norm_l2(u0), 0.24, 1.0, StokesSeries(u0, 1.0), 5.0);
    EXPECT_TRUE(b.reached_horizon());
    EXPECT_EQ(b.T0(), 5.0);
    EXPECT_EQ(b.rhs(0.0), 0.0);
}

TEST(Theorem3Bound, SingleModeBisectionOracle)
{
    // Unit-energy shear: int_0^t sum_m (H_m^ell)^2 = sum_m r_m^2 moment(m, t)
    // with r_m the c-normalization of H_m.
    SpectralVelocity u0 = shear(1.0);
    const double scale = 1.0 / norm_l2(u0);
    u0 *= scale;
    const double l2 = norm_l2(u0);
    const double c0 = 0.24;
    const double alpha = 1.0;
    const int M = 60;
    const auto log_r2 = [&](int m) {
        if (m % 2 == 0) {
            const int k = m / 2;
            return -2.0 * (k * std::log(2.0) + lf(k)) - 2.0 * alpha * lf(k);
        }
        const int k = (m + 1) / 2;
        return std::log(2.0) - 2.0 * k * std::log(2.0) - lf(k - 1) - lf(k) - 2.0 * alpha * lf(k);
    };
    const auto integral = [&](double t) {
        double s = 0.0;
        for (int m = 0; m <= M; ++m) {
            s += l2 * l2 * std::exp(log_r2(m)) * moment(m, t);
        }
        return s;
    };
    const double ca = std::sqrt(4.0 / 3.0);
    const double threshold = std::pow(1.0 / (256.0 * c0 * c0 * ca * ca * l2), 2);
    double lo = 0.0;
    double hi = 10.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (integral(mid) < threshold ? lo : hi) = mid;
    }
    const Theorem3Bound b = theorem3_rhs(l2, c0, alpha, StokesSeries(u0, alpha, M), 10.0);
    ASSERT_FALSE(b.reached_horizon());
    EXPECT_NEAR(b.T0(), lo, 1e-10 * lo);
    EXPECT_NEAR(b.threshold(), threshold, 1e-12 * threshold);
    EXPECT_NEAR(b.rhs(b.T0()), 64.0 * c0 * c0 * ca * ca * l2 * l2 * integral(b.T0()), 1e-10 * b.rhs(b.T0()));
}

TEST(LemmaAudit, CccExamples)
{
    const CccAudit a = lemma_audit_ccc0(6, {1.0});
    const auto find = [&](int k, int j) {
        for (const auto& r : a.rows) {
            if (r.k == k && r.j == j) {
                return r;
            }
        }
        return CccRow{};
    };
    const CccRow r21 = find(2, 1);
    EXPECT_NEAR(r21.ratio, 0.5, 1e-15);
    EXPECT_TRUE(r21.printed_ok);
    const CccRow r61 = find(6, 1);
    EXPECT_NEAR(r61.ratio, 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(r61.printed_bound, 0.03125, 1e-15);
    EXPECT_FALSE(r61.printed_ok);
    EXPECT_TRUE(r61.corrected_ok);
    EXPECT_NEAR(r61.corrected_bound, 0.5, 1e-15);
    const CccRow r50 = find(5, 0);
    EXPECT_EQ(r50.ratio, 1.0);
    EXPECT_EQ(r50.corrected_bound, 1.0);
    EXPECT_TRUE(r50.corrected_ok);
    EXPECT_THROW(lemma_audit_ccc0(1, {1.0}), config_error);
}

TEST(LemmaAudit, CorrectedBoundHoldsAndPrintedSetIsStable)
{
    const CccAudit a = lemma_audit_ccc0(20, {0.5, 1.0, 2.0});
    EXPECT_TRUE(a.corrected_violations.empty());
    EXPECT_FALSE(a.printed_violations.empty());
    EXPECT_EQ(a.rows.size(), 3u * 231u);
    const CccAudit b = lemma_audit_ccc0(20, {0.5, 1.0, 2.0});
    ASSERT_EQ(a.printed_violations.size(), b.printed_violations.size());
    std::set<std::tuple<int, int, double>> sa;
    std::set<std::tuple<int, int, double>> sb;
    for (std::size_t i = 0; i < a.printed_violations.size(); ++i) {
        sa.insert({a.printed_violations[i].k, a.printed_violations[i].j, a.printed_violations[i].alpha});
        sb.insert({b.printed_violations[i].k, b.printed_violations[i].j, b.printed_violations[i].alpha});
    }
    EXPECT_EQ(sa, sb);
    // every endpoint j = 0 with k >= 1 breaks the printed bound
    EXPECT_EQ(sa.count({7, 0, 1.0}), 1u);
}

TEST(LemmaAudit, ConvolutionExamples)
{
    const ConvolutionTerms pair = convolution_terms({1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0});
    EXPECT_NEAR(pair.lhs, 3.0, 1e-15);
    EXPECT_NEAR(pair.rhs, 4.0, 1e-14);
    const ConvolutionTerms delta = convolution_terms({1.0}, {1.0}, {1.0});
    EXPECT_EQ(delta.lhs / delta.rhs, 1.0);
    const ConvolutionAudit audit = lemma_audit_convolution(10000, 32, 7);
    EXPECT_EQ(audit.trials, 10000);
    EXPECT_LE(audit.worst_ratio, 1.0 + 1e-12);
    EXPECT_GT(audit.worst_ratio, 0.0);
    EXPECT_EQ(lemma_audit_convolution(10000, 32, 7).worst_ratio, audit.worst_ratio);
}

TEST(DecayFit, ExactPowerLaw)
{
    std::vector<double> t;
    std::vector<double> n;
    for (int i = 1; i <= 50; ++i) {
        t.push_back(0.2 * i);
        n.push_back(3.0 / std::sqrt(t.back()));
    }
    const DecayFit f = fit_decay(t, n, 1.0, 8.0);
    EXPECT_NEAR(f.K_fit, 3.0, 1e-12);
    EXPECT_NEAR(f.gamma_fit, 0.5, 1e-12);
    EXPECT_LE(f.residual, 1e-12);
    EXPECT_TRUE(f.gamma_positive);
    EXPECT_FALSE(f.super_algebraic);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= 1.0 && t[i] <= 8.0) {
            EXPECT_LE(n[i], f.K_fit * std::pow(t[i], -f.gamma_fit) * (1.0 + f.residual));
        }
    }
}

TEST(DecayFit, ExponentialDecayIsSuperAlgebraic)
{
    std::vector<double> t;
    std::vector<double> n;
    for (int i = 1; i <= 400; ++i) {
        t.push_back(0.1 * i);
        n.push_back(std::exp(-t.back()));
    }
    const DecayFit short_window = fit_decay(t, n, 1.0, 5.0);
    const DecayFit long_window = fit_decay(t, n, 1.0, 40.0);
    EXPECT_GT(long_window.gamma_fit, short_window.gamma_fit);
    EXPECT_TRUE(long_window.super_algebraic);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= 1.0 && t[i] <= 40.0) {
            EXPECT_LE(n[i], long_window.K_fit * std::pow(t[i], -long_window.gamma_fit) * (1.0 + 1e-12));
        }
    }
}

TEST(DecayFit, ConstantAndDegenerateSeries)
{
    const std::vector<double> t{1.0, 2.0, 3.0, 4.0, 5.0};
    const DecayFit c = fit_decay(t, {2.0, 2.0, 2.0, 2.0, 2.0}, 1.0, 5.0);
    EXPECT_NEAR(c.gamma_fit, 0.0, 1e-14);
    EXPECT_FALSE(c.gamma_positive);
    EXPECT_THROW(fit_decay(t, {1.0, 1.0, 1.0, 1.0, 1.0}, 2.0, 3.0), config_error);
    EXPECT_THROW(fit_decay(t, {1.0, 1.0}, 1.0, 5.0), config_error);
    const std::vector<double> tt{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    const DecayFit tr = fit_decay(tt, {1.0, 0.5, 0.3, 0.2, 0.0, 0.0}, 1.0, 6.0);
    EXPECT_TRUE(tr.truncated);
    EXPECT_EQ(tr.points, 4);
}
